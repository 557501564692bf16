use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Decide, search and certify monochromatic configurations in 2-colorings.
#[derive(Debug, Clone, PartialEq, Eq, Parser)]
#[command(name = "monochrome", version)]
pub struct RunPlan {
    /// Seed for generated colorings.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Is every 2-coloring of [lo, n] forced to contain an instance?
    Forced(IntervalArgs),
    /// Least n at which the template is forced.
    Threshold(ThresholdArgs),
    /// Find and write a coloring of [lo, n] avoiding every instance.
    Witness(WitnessArgs),
    /// Check that a coloring avoids every instance.
    Verify(VerifyArgs),
    /// DIMACS encoding and model checking.
    #[command(subcommand)]
    Cnf(CnfCommand),
    /// Search for a monochromatic products-of-sums structure.
    Structures(StructuresArgs),
    /// Search for a bichromatic products-of-sums structure.
    Bichromatic(BichromaticArgs),
    /// Build sets F, G with equal sum and product.
    Bridge(BridgeArgs),
    /// Least finite-sum step with a dense progression intersection.
    VdwStep(VdwArgs),
    /// Run a constructive case analysis on a thick color class.
    Extract(ExtractArgs),
    /// Label a coloring by thickness and syndeticity of its classes.
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum CnfCommand {
    /// Write the CNF for [lo, n].
    Emit(EmitArgs),
    /// Decode a solver model and verify it as a witness.
    CheckModel(CheckModelArgs),
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct TemplateArgs {
    /// Template file or bundled template name.
    #[arg(long)]
    pub template: String,
    /// Parameter binding `k=v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, default_value_t = monochrome::search::DEFAULT_NODE_BUDGET)]
    pub max_nodes: u64,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = monochrome::search::DEFAULT_TIME_BUDGET.as_secs())]
    pub time_limit: u64,
    #[arg(long)]
    pub no_symmetry_break: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct IntervalArgs {
    #[command(flatten)]
    pub template: TemplateArgs,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub template: TemplateArgs,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub max_n: u64,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub interval: IntervalArgs,
    /// Coloring file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub template: TemplateArgs,
    /// `file:<path>`, `rule:<name>:<params>` or `generated`.
    #[arg(long)]
    pub coloring: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct EmitArgs {
    #[command(flatten)]
    pub template: TemplateArgs,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub no_symmetry_break: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct CheckModelArgs {
    #[command(flatten)]
    pub template: TemplateArgs,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub n: u64,
    /// Solver output (`s`/`v` lines or a bare literal list).
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct StructuresArgs {
    #[arg(long)]
    pub coloring: String,
    /// Comma-separated sizes of S_1, S_2, ...
    #[arg(long)]
    pub sizes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct BichromaticArgs {
    #[arg(long)]
    pub coloring: String,
    #[arg(long)]
    pub size0: usize,
    #[arg(long)]
    pub sizes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct BridgeArgs {
    /// Comma-separated elements of S_0.
    #[arg(long)]
    pub s0: String,
    /// Sets S_1..S_m, `;`-separated, elements comma-separated.
    #[arg(long)]
    pub sets: String,
    /// One element from each of S_1..S_m.
    #[arg(long)]
    pub choices: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct VdwArgs {
    /// Comma-separated set; conflicts with --coloring.
    #[arg(long, conflicts_with = "coloring")]
    pub set: Option<String>,
    /// Take the set to be one class of this coloring.
    #[arg(long, requires = "class")]
    pub coloring: Option<String>,
    #[arg(long)]
    pub class: Option<u8>,
    #[arg(long)]
    pub steps: String,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long)]
    pub hi: u64,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value = "0.1")]
    pub tau: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Xny,
    Tower,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub coloring: String,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// `n=<value>`; defaults to 1 for xny and 2 for tower.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Thick class: 0, 1 or auto.
    #[arg(long, default_value = "auto")]
    pub class: String,
    /// Every extracted variable exceeds this value.
    #[arg(long, default_value = "0")]
    pub floor: String,
    /// Candidates a witness examines per request.
    #[arg(long, default_value_t = monochrome::thick::DEFAULT_CANDIDATE_BUDGET)]
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub coloring: String,
    #[arg(long, default_value_t = 8)]
    pub fbound: u64,
    #[arg(long, default_value_t = 3)]
    pub min_runs: usize,
    #[arg(long, default_value_t = 1)]
    pub window_lo: u64,
    #[arg(long, default_value_t = 100_000)]
    pub window_hi: u64,
}

fn push(out: &mut Vec<String>, flag: &str, value: impl ToString) {
    out.push(format!("--{flag}"));
    out.push(value.to_string());
}

fn flag(out: &mut Vec<String>, name: &str, on: bool) {
    if on {
        out.push(format!("--{name}"));
    }
}

impl TemplateArgs {
    fn args(&self, out: &mut Vec<String>) {
        push(out, "template", &self.template);
        for p in &self.params {
            push(out, "param", p);
        }
    }
}

impl SearchArgs {
    fn args(&self, out: &mut Vec<String>) {
        push(out, "threads", self.threads);
        push(out, "max-nodes", self.max_nodes);
        push(out, "time-limit", self.time_limit);
        flag(out, "no-symmetry-break", self.no_symmetry_break);
    }
}

impl IntervalArgs {
    fn args(&self, out: &mut Vec<String>) {
        self.template.args(out);
        push(out, "lo", self.lo);
        push(out, "n", self.n);
        self.search.args(out);
    }
}

impl RunPlan {
    /// Parse an argument vector whose first element is the program name.
    pub fn parse_args<I, T>(argv: I) -> Result<RunPlan, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        RunPlan::try_parse_from(argv)
    }

    /// Flag form with every default spelled out, program name excluded.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        let o = &mut out;
        match &self.command {
            Command::Forced(a) => {
                o.push("forced".into());
                a.args(o);
            }
            Command::Threshold(a) => {
                o.push("threshold".into());
                a.template.args(o);
                push(o, "lo", a.lo);
                push(o, "max-n", a.max_n);
                a.search.args(o);
            }
            Command::Witness(a) => {
                o.push("witness".into());
                a.interval.args(o);
                if let Some(p) = &a.out {
                    push(o, "out", p.display());
                }
            }
            Command::Verify(a) => {
                o.push("verify".into());
                a.template.args(o);
                push(o, "coloring", &a.coloring);
            }
            Command::Cnf(CnfCommand::Emit(a)) => {
                o.extend(["cnf".into(), "emit".into()]);
                a.template.args(o);
                push(o, "lo", a.lo);
                push(o, "n", a.n);
                flag(o, "no-symmetry-break", a.no_symmetry_break);
                push(o, "out", a.out.display());
            }
            Command::Cnf(CnfCommand::CheckModel(a)) => {
                o.extend(["cnf".into(), "check-model".into()]);
                a.template.args(o);
                push(o, "lo", a.lo);
                push(o, "n", a.n);
                push(o, "model", a.model.display());
            }
            Command::Structures(a) => {
                o.push("structures".into());
                push(o, "coloring", &a.coloring);
                push(o, "sizes", &a.sizes);
            }
            Command::Bichromatic(a) => {
                o.push("bichromatic".into());
                push(o, "coloring", &a.coloring);
                push(o, "size0", a.size0);
                push(o, "sizes", &a.sizes);
            }
            Command::Bridge(a) => {
                o.push("bridge".into());
                push(o, "s0", &a.s0);
                push(o, "sets", &a.sets);
                push(o, "choices", &a.choices);
            }
            Command::VdwStep(a) => {
                o.push("vdw-step".into());
                if let Some(s) = &a.set {
                    push(o, "set", s);
                }
                if let Some(c) = &a.coloring {
                    push(o, "coloring", c);
                }
                if let Some(c) = a.class {
                    push(o, "class", c);
                }
                push(o, "steps", &a.steps);
                push(o, "lo", a.lo);
                push(o, "hi", a.hi);
                push(o, "k", a.k);
                push(o, "tau", &a.tau);
            }
            Command::Extract(a) => {
                o.push("extract".into());
                push(o, "coloring", &a.coloring);
                push(o, "mode", a.mode.to_possible_value().expect("named").get_name());
                for p in &a.params {
                    push(o, "param", p);
                }
                push(o, "class", &a.class);
                push(o, "floor", &a.floor);
                push(o, "candidates", a.candidates);
            }
            Command::Classify(a) => {
                o.push("classify".into());
                push(o, "coloring", &a.coloring);
                push(o, "fbound", a.fbound);
                push(o, "min-runs", a.min_runs);
                push(o, "window-lo", a.window_lo);
                push(o, "window-hi", a.window_hi);
            }
        }
        push(o, "seed", self.seed);
        if let Some(r) = &self.report {
            push(o, "report", r.display());
        }
        out
    }

    /// The plan as one shell-quoted line.
    pub fn render(&self) -> String {
        let args = self.to_args();
        shlex::try_join(args.iter().map(String::as_str)).expect("arguments contain no NUL")
    }

    /// Parse a line produced by [`RunPlan::render`].
    pub fn from_line(line: &str) -> Result<RunPlan, String> {
        let words = shlex::split(line).ok_or_else(|| format!("cannot split `{line}`"))?;
        RunPlan::parse_args(std::iter::once("monochrome".to_string()).chain(words)).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(args: &str) -> RunPlan {
        RunPlan::parse_args(std::iter::once("monochrome").chain(args.split_whitespace())).unwrap()
    }

    #[test]
    fn spec_style_plans_parse() {
        let p = plan("forced --template schur.tmpl --lo 1 --n 5");
        let Command::Forced(a) = &p.command else { panic!() };
        assert_eq!((a.lo, a.n), (1, 5));
        let p = plan("cnf emit --template gg.tmpl --param n=2 --lo 1 --n 44 --out gg44.cnf");
        let Command::Cnf(CnfCommand::Emit(a)) = &p.command else { panic!() };
        assert_eq!(a.template.params, vec!["n=2".to_string()]);
        let p = plan("extract --coloring rule:blocks:L=16 --mode xny --param n=3");
        let Command::Extract(a) = &p.command else { panic!() };
        assert_eq!(a.mode, Mode::Xny);
    }

    #[test]
    fn rendered_plans_round_trip() {
        for args in [
            "forced --template schur --n 5",
            "threshold --template xny --param n=2 --max-n 40 --threads 2",
            "witness --template schur --n 4 --out /tmp/w.col",
            "verify --template schur --coloring file:/tmp/w.col",
            "cnf emit --template xyxy --n 20 --out a.cnf --no-symmetry-break",
            "cnf check-model --template xyxy --n 20 --model m.txt",
            "structures --coloring rule:const:hi=12 --sizes 2,1",
            "bichromatic --coloring rule:threshold:t=10,hi=60 --size0 1 --sizes 1",
            "bridge --s0 1,2 --sets 3,4;5 --choices 3,5",
            "vdw-step --set 1,2,3,4,5 --steps 1,2 --hi 50 --k 2 --tau 0.5",
            "extract --coloring generated --mode tower --param n=3 --seed 9",
            "classify --coloring rule:parity:hi=1000 --window-hi 500",
        ] {
            let p = plan(args);
            assert_eq!(RunPlan::from_line(&p.render()).unwrap(), p, "{args}");
        }
    }

    #[test]
    fn quoted_paths_survive_rendering() {
        let p = RunPlan::parse_args(["monochrome", "verify", "--template", "schur", "--coloring", "file:/tmp/my dir/w.col"]).unwrap();
        assert!(p.render().contains("'file:/tmp/my dir/w.col'"));
        assert_eq!(RunPlan::from_line(&p.render()).unwrap(), p);
    }

    #[test]
    fn conflicting_sources_are_rejected() {
        let r = RunPlan::parse_args(["monochrome", "vdw-step", "--set", "1", "--coloring", "rule:parity", "--class", "0", "--steps", "1", "--hi", "9"]);
        assert!(r.is_err());
    }
}
