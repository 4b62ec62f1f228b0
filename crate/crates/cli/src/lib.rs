//! The `cycles` command: evaluate, check, render and animate figure
//! documents.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cycles::figure::{NodeStatus, Source, GHOST_GEN};
use cycles::render::{animate, frame_values, render_svg, round_sig, Viewport};
use cycles::{Cycle, Figure, Scalar};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage, parse and I/O errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for empty nodes and failed assertions.
pub const EXIT_FAILED: i32 = 2;

const DIGITS: usize = 12;

#[derive(Parser)]
#[command(name = "cycles", version, about = "Evaluate and draw ensembles of cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every node with its solved cycles.
    Eval { doc: PathBuf },
    /// Run the assertions embedded in the document.
    Check { doc: PathBuf },
    /// Draw a two-dimensional figure as SVG.
    Render {
        doc: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        view: ViewArgs,
    },
    /// Draw one SVG frame per parameter value.
    Animate {
        doc: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        frames: usize,
        /// Directory receiving frame_000.svg, frame_001.svg, ...
        #[arg(short)]
        output: PathBuf,
        #[command(flatten)]
        view: ViewArgs,
    },
}

#[derive(Args)]
struct ViewArgs {
    #[arg(long, num_args = 4, required = true, allow_negative_numbers = true,
          value_names = ["XMIN", "XMAX", "YMIN", "YMAX"])]
    viewport: Vec<f64>,
    #[arg(long, default_value_t = 300)]
    size: u32,
    #[arg(long, default_value_t = cycles::render::DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    no_real_line: bool,
}

impl ViewArgs {
    fn viewport(&self) -> cycles::Result<Viewport> {
        let v = &self.viewport;
        Viewport::new(v[0], v[1], v[2], v[3], self.size)?.with_grid(self.grid)
    }
}

/// A scalar rounded to twelve significant digits, with the imaginary part
/// shown only when it is not negligible.
pub fn format_scalar(z: Scalar, eps: f64) -> String {
    let re = round_sig(z.re, DIGITS);
    if z.im.abs() < eps {
        return re.to_string();
    }
    let im = round_sig(z.im, DIGITS);
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// `(k, [l…], m)` after numeric normalisation.
pub fn format_cycle(c: &Cycle, eps: f64) -> String {
    let c = c.num_normalize(eps);
    let l: Vec<String> = c.l().iter().map(|&x| format_scalar(x, eps)).collect();
    format!(
        "({}, [{}], {})",
        format_scalar(c.k(), eps),
        l.join(", "),
        format_scalar(c.m(), eps)
    )
}

fn parent_summary(f: &Figure, source: &Source) -> String {
    match source {
        Source::Fixed => String::new(),
        Source::Point { coords, .. } => {
            let xs: Vec<String> = coords
                .iter()
                .map(|c| match c.eval(f.parameters()) {
                    Ok(x) => round_sig(x, DIGITS).to_string(),
                    Err(_) => "?".into(),
                })
                .collect();
            format!("point({})", xs.join(", "))
        }
        Source::Relations(rels) => rels
            .iter()
            .map(|r| {
                let sep = if r.spec.use_cycle_metric { "|" } else { "/" };
                format!("{}{sep}{}", r.spec.parent, r.spec.kind.code())
            })
            .collect::<Vec<_>>()
            .join(", "),
        Source::Subfigure { sub, inputs } => {
            format!("{}({})", sub.name.as_deref().unwrap_or("subfigure"), inputs.join(", "))
        }
    }
}

/// The node table printed by `eval`, and whether some node came out empty.
pub fn eval_report(f: &Figure) -> (String, bool) {
    let eps = f.epsilon();
    let mut out = String::new();
    let mut empty = false;
    for node in f.nodes().filter(|n| n.generation() > GHOST_GEN) {
        let values = match node.status() {
            NodeStatus::Underdetermined(free) => format!("underdetermined ({free} free)"),
            NodeStatus::Failed(msg) => {
                empty = true;
                format!("failed: {msg}")
            }
            NodeStatus::Pending => "pending".into(),
            NodeStatus::Solved if node.cycles().is_empty() => {
                empty = true;
                "{}".into()
            }
            NodeStatus::Solved => node
                .cycles()
                .iter()
                .map(|c| format_cycle(c, eps))
                .collect::<Vec<_>>()
                .join("; "),
        };
        let parents = parent_summary(f, node.source());
        let line = if parents.is_empty() {
            format!("{} [{}]: {values}", node.key(), node.generation())
        } else {
            format!("{} [{}]: {values} <- {parents}", node.key(), node.generation())
        };
        out.push_str(&line);
        out.push('\n');
    }
    (out, empty)
}

/// The PASS/FAIL lines printed by `check`, and whether all passed.
pub fn check_report(f: &Figure) -> (String, bool) {
    let mut out = String::new();
    let mut all = true;
    for o in f.run_assertions() {
        all &= o.passed;
        out.push_str(&format!(
            "{} {} residual={:e} tol={:e}\n",
            if o.passed { "PASS" } else { "FAIL" },
            o.label,
            round_sig(o.residual, 6),
            o.tol
        ));
    }
    (out, all)
}

fn load(doc: &Path) -> Result<Figure, String> {
    Figure::load(doc).map_err(|e| e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Eval { doc } => {
            let (report, empty) = eval_report(&load(&doc)?);
            out.write_all(report.as_bytes()).map_err(io)?;
            Ok(if empty { EXIT_FAILED } else { EXIT_OK })
        }
        Command::Check { doc } => {
            let (report, all) = check_report(&load(&doc)?);
            out.write_all(report.as_bytes()).map_err(io)?;
            Ok(if all { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Render { doc, output, view } => {
            let f = load(&doc)?;
            let svg = render_svg(&f, &view.viewport().map_err(|e| e.to_string())?, !view.no_real_line)
                .map_err(|e| e.to_string())?;
            match output {
                Some(path) => write_file(&path, &svg)?,
                None => out.write_all(svg.as_bytes()).map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Animate {
            doc,
            param,
            from,
            to,
            frames,
            output,
            view,
        } => {
            let f = load(&doc)?;
            let values = frame_values(from, to, frames);
            let svgs = animate(&f, &param, &values, &view.viewport().map_err(|e| e.to_string())?, !view.no_real_line)
                .map_err(|e| e.to_string())?;
            std::fs::create_dir_all(&output).map_err(|e| format!("{}: {e}", output.display()))?;
            for (i, svg) in svgs.iter().enumerate() {
                write_file(&output.join(format!("frame_{i:03}.svg")), svg)?;
            }
            writeln!(out, "wrote {} frames to {}", svgs.len(), output.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
