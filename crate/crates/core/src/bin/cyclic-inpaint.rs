use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic_inpaint::io::{self, RenderStyle};
use cyclic_inpaint::synth::{self, BandOrientation, BlocksGeometry, RampDirection};
use cyclic_inpaint::{init, solver, Error, Mask, ModelKind, PhaseImage, Result, SolverConfig, Weights};

#[derive(Parser, Debug)]
#[command(name = "cyclic-inpaint", version, about = "Inpainting and denoising of phase-valued images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic phase image.
    Synth(SynthArgs),
    /// Generate a mask (0 = unknown, 255 = known).
    Mask(MaskArgs),
    /// Fill unknown pixels by zero-difference extrapolation.
    Init(InitArgs),
    /// Initialize and minimize the functional.
    Inpaint(InpaintArgs),
    /// Compare two phase images.
    Metrics {
        result: PathBuf,
        reference: PathBuf,
    },
    /// Render a phase image as PGM or PPM.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Style::Hue)]
        style: Style,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SynthKind {
    Atan2,
    Ramp,
    Blocks,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MaskKind {
    Subsample3,
    Random,
    Disc,
    Band,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Style {
    Gray,
    Hue,
}

impl From<Style> for RenderStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::Gray => RenderStyle::Gray,
            Style::Hue => RenderStyle::Hue,
        }
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    kind: SynthKind,
    #[arg(long, default_value_t = 64)]
    rows: usize,
    /// Defaults to `rows`; atan2 is always square.
    #[arg(long)]
    cols: Option<usize>,
    /// Ramp increment per pixel.
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    slope: f64,
    #[arg(long, value_enum, default_value_t = Orientation::Horizontal)]
    direction: Orientation,
    /// Standard deviation of wrapped Gaussian noise; 0 disables noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct MaskArgs {
    kind: MaskKind,
    #[arg(long, default_value_t = 64)]
    rows: usize,
    #[arg(long)]
    cols: Option<usize>,
    /// Fraction of pixels lost (random).
    #[arg(long, default_value_t = 0.2)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radius in pixels (disc).
    #[arg(long, default_value_t = 16.0)]
    radius: f64,
    #[arg(long, value_enum, default_value_t = Orientation::Vertical)]
    orientation: Orientation,
    /// First unknown row or column (band).
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// Band width in pixels.
    #[arg(long, default_value_t = 8)]
    width: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    /// First-order weights: horizontal, vertical, diagonal, anti-diagonal.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 0.0, 0.0])]
    alpha: Vec<f64>,
    /// Second-order weights: horizontal, vertical.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    beta: Vec<f64>,
    /// Mixed second-order weight.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

impl ModelArgs {
    fn weights(&self) -> Result<Weights> {
        let alpha: [f64; 4] = self.alpha.as_slice().try_into().map_err(|_| bad("--alpha takes 4 values"))?;
        let beta: [f64; 2] = self.beta.as_slice().try_into().map_err(|_| bad("--beta takes 2 values"))?;
        Weights::new(alpha, beta, self.gamma)
    }

    fn load(&self) -> Result<(PhaseImage, Mask)> {
        let f = io::read_phase(&self.input)?;
        let mask = io::read_mask(&self.mask)?;
        if f.shape() != mask.shape() {
            return Err(Error::ShapeMismatch { expected: f.shape(), actual: mask.shape() });
        }
        Ok((f, mask))
    }
}

#[derive(Args, Debug)]
struct InitArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct InpaintArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 700)]
    sweeps: usize,
    #[arg(long, default_value_t = FRAC_PI_2)]
    lambda0: f64,
    /// Use the data-fidelity model; known pixels are treated as noisy.
    #[arg(long)]
    noisy: bool,
    /// Record the energy every this many sweeps; 0 records only start and end.
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    #[arg(long)]
    serial: bool,
    #[arg(short, long)]
    output: PathBuf,
    /// Energy trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    render_gray: Option<PathBuf>,
    #[arg(long)]
    render_hue: Option<PathBuf>,
}

fn bad(message: &str) -> Error {
    Error::InvalidArgument(message.to_string())
}

fn shape(rows: usize, cols: Option<usize>) -> (usize, usize) {
    (rows, cols.unwrap_or(rows))
}

fn direction(o: Orientation) -> RampDirection {
    match o {
        Orientation::Horizontal => RampDirection::Horizontal,
        Orientation::Vertical => RampDirection::Vertical,
    }
}

/// C `%#.6g`: six significant digits, trailing zeros kept.
fn fmt_g6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let digits = (5 - exp) as usize;
        let s = format!("{v:.digits$}");
        if digits == 0 { s + "." } else { s }
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn synth_cmd(a: &SynthArgs) -> Result<()> {
    let (rows, cols) = shape(a.rows, a.cols);
    let clean = match a.kind {
        SynthKind::Atan2 => synth::gen_atan2(rows)?,
        SynthKind::Ramp => synth::gen_wrapped_ramp((rows, cols), a.slope, direction(a.direction))?,
        SynthKind::Blocks => synth::gen_blocks((rows, cols), &BlocksGeometry::default())?,
    };
    let x = if a.noise_sigma > 0.0 {
        synth::add_wrapped_gaussian_noise(&clean, a.noise_sigma, a.seed)?
    } else {
        clean
    };
    io::write_phase(&a.output, &x)?;
    println!("synth {:?} {}x{} noise_sigma={} seed={} -> {}", a.kind, x.rows(), x.cols(), a.noise_sigma, a.seed, a.output.display());
    Ok(())
}

fn mask_cmd(a: &MaskArgs) -> Result<()> {
    let s = shape(a.rows, a.cols);
    let mask = match a.kind {
        MaskKind::Subsample3 => synth::mask_subsample3(s)?,
        MaskKind::Random => synth::mask_random(s, a.fraction, a.seed)?,
        MaskKind::Disc => synth::mask_disc(s, a.radius)?,
        MaskKind::Band => {
            let orientation = match a.orientation {
                Orientation::Horizontal => BandOrientation::Horizontal,
                Orientation::Vertical => BandOrientation::Vertical,
            };
            synth::mask_band(s, orientation, a.start, a.width)?
        }
    };
    io::write_mask(&a.output, &mask)?;
    println!("mask {:?} {}x{} unknown={} -> {}", a.kind, s.0, s.1, mask.count_unknown(), a.output.display());
    Ok(())
}

fn init_cmd(a: &InitArgs) -> Result<()> {
    let weights = a.model.weights()?;
    let (f, mask) = a.model.load()?;
    let report = init::initialize_with_report(&f, &mask, &weights)?;
    io::write_phase(&a.output, &report.image)?;
    println!("init filled={} unreachable={} -> {}", report.fills.len(), report.unreachable.len(), a.output.display());
    Ok(())
}

fn inpaint_cmd(a: &InpaintArgs) -> Result<()> {
    let weights = a.model.weights()?;
    let kind = if a.noisy { ModelKind::Noisy } else { ModelKind::Noiseless };
    let config = SolverConfig {
        lambda0: a.lambda0,
        max_sweeps: a.sweeps,
        order: None,
        record_energy_every: a.record_every,
        parallel: !a.serial,
    };
    config.validate(kind)?;
    println!(
        "config input={} mask={} model={:?} alpha={:?} beta={:?} gamma={} sweeps={} lambda0={} record_every={} parallel={}",
        a.model.input.display(),
        a.model.mask.display(),
        kind,
        weights.alpha,
        weights.beta,
        weights.gamma,
        config.max_sweeps,
        config.lambda0,
        config.record_energy_every,
        config.parallel
    );
    let (f, mask) = a.model.load()?;
    let x0 = match kind {
        ModelKind::Noiseless => init::initialize(&f, &mask, &weights)?,
        ModelKind::Noisy => f.clone(),
    };
    let report = solver::run_cppa(&x0, &f, &mask, &weights, kind, &config)?;
    io::write_phase(&a.output, &report.image)?;
    if let Some(path) = &a.trace {
        io::write_trace(path, &report.energy_trace)?;
    }
    if let Some(path) = &a.render_gray {
        io::write_render(path, &report.image, RenderStyle::Gray)?;
    }
    if let Some(path) = &a.render_hue {
        io::write_render(path, &report.image, RenderStyle::Hue)?;
    }
    let first = report.energy_trace.first().map_or(f64::NAN, |e| e.1);
    let last = report.energy_trace.last().map_or(f64::NAN, |e| e.1);
    println!(
        "done sweeps={} energy {} -> {} elapsed={:.3}s -> {}",
        report.sweeps,
        fmt_g6(first),
        fmt_g6(last),
        report.elapsed.as_secs_f64(),
        a.output.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth_cmd(&a),
        Command::Mask(a) => mask_cmd(&a),
        Command::Init(a) => init_cmd(&a),
        Command::Inpaint(a) => inpaint_cmd(&a),
        Command::Metrics { result, reference } => {
            let x = io::read_phase(&result)?;
            let y = io::read_phase(&reference)?;
            let (mse, max) = synth::cyclic_error(&x, &y)?;
            debug_assert!(max <= PI);
            println!("mse={} max={}", fmt_g6(mse), fmt_g6(max));
            Ok(())
        }
        Command::Render { input, output, style } => {
            let x = io::read_phase(&input)?;
            io::write_render(&output, &x, style.into())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_g6;

    #[test]
    fn g6_matches_c_alternate_form() {
        assert_eq!(fmt_g6(0.0), "0.00000");
        assert_eq!(fmt_g6(1.0), "1.00000");
        assert_eq!(fmt_g6(0.0123456789), "0.0123457");
        assert_eq!(fmt_g6(123456.7), "123457.");
        assert_eq!(fmt_g6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_g6(0.00001234), "1.23400e-05");
        assert_eq!(fmt_g6(-4.5678912), "-4.56789");
    }
}
