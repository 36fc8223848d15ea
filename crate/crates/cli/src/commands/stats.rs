use std::path::PathBuf;

use adares_core::SizeHistogram;
use anyhow::{Context, Result};
use clap::Args;

use super::util;

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long, value_name = "PATH")]
    pub plans: PathBuf,

    /// Histogram bin width over the longer target edge, in pixels.
    #[arg(long, default_value_t = 128, env = "ADARES_BIN_WIDTH")]
    pub bin_width: u32,

    /// Output CSV (`bin_lower_px,count`).
    #[arg(long, short = 'o', value_name = "PATH")]
    pub output: PathBuf,

    /// Optional SVG bar chart of the same histogram.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

pub fn run(args: StatsArgs) -> Result<()> {
    anyhow::ensure!(args.bin_width > 0, "bin width must be >= 1");
    let plans = util::load_plans(&args.plans)?;
    let histogram = SizeHistogram::from_plans(&plans, args.bin_width);

    std::fs::write(&args.output, histogram.to_csv())
        .with_context(|| format!("writing {}", args.output.display()))?;
    if let Some(path) = &args.svg {
        std::fs::write(path, render_svg(&histogram))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    println!(
        "{} images in {} bins (width {} px) -> {}",
        histogram.total_images,
        histogram.bins.len(),
        histogram.bin_width_px,
        args.output.display()
    );
    Ok(())
}

/// Minimal bar chart: one bar per occupied bin, labeled axes.
fn render_svg(histogram: &SizeHistogram) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 360.0;
    const MARGIN_LEFT: f64 = 50.0;
    const MARGIN_BOTTOM: f64 = 40.0;
    const MARGIN_TOP: f64 = 20.0;

    let max_count = histogram.bins.iter().map(|b| b.count).max().unwrap_or(0);
    let plot_w = WIDTH - MARGIN_LEFT - 10.0;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if max_count > 0 {
        let bar_w = (plot_w / histogram.bins.len() as f64 * 0.8).max(1.0);
        let step = plot_w / histogram.bins.len() as f64;
        for (i, bin) in histogram.bins.iter().enumerate() {
            let h = bin.count as f64 / max_count as f64 * plot_h;
            let x = MARGIN_LEFT + i as f64 * step + (step - bar_w) / 2.0;
            let y = MARGIN_TOP + plot_h - h;
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" \
                 fill=\"steelblue\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
                x + bar_w / 2.0,
                HEIGHT - MARGIN_BOTTOM + 14.0,
                bin.long_side_lower_px
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + 10.0,
            max_count
        ));
    }

    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">longer target edge (px, bin lower bound)</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    ));
    svg.push_str("</svg>\n");
    svg
}
