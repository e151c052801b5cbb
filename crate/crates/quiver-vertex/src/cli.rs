//! The `qvertex` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::fixed::{slant_sum_fixed_point, tangent_character, zero_dim_point, Chamber, FixedPointData};
use crate::io::{self, Ledger};
use crate::kacmoody::{
    convolution_tangent_character, dim_identity_check, dual_tangent_character, extremal_word, gt_character,
    positive_real_roots, quiver_variety_dim, CharacterTerm,
};
use crate::scalar::{format_rational, parse_rational, SamplePoint};
use crate::theory::{slant_sum, QuiverGaugeTheory, SlantSumSpec};
use crate::verify::{
    check_branching, check_dim_corpus, check_factorization, check_ruijsenaars, check_zero_dim_conjecture,
    seeds_from, twisted_vs_shift_check, CheckReport, ConjectureForm, FactorizationVariant, SlantSumInstance,
    Status,
};
use crate::vertex::{vertex, Descendant, DescendantShift, Regularization, Twist, VertexOptions};

/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qvertex", version = crate::version(), about = "Exact vertex functions of quiver gauge theories")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Total z-degree to truncate at.
    #[arg(long, global = true, default_value_t = 4)]
    pub order: u32,
    #[arg(long, global = true, env = "QVERTEX_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Number of sample points for checks.
    #[arg(long, global = true, default_value_t = 2)]
    pub samples: usize,
    #[arg(long, global = true)]
    pub q_equals_hbar: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Print balanced `q^k ħ^{-k}` as `κ^k`.
    #[arg(long, global = true)]
    pub kappa: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Where a theory (and maybe a fixed point) comes from.
#[derive(Args, Debug, Clone, Default)]
pub struct Input {
    /// Theory file.
    #[arg(long, alias = "quiver")]
    pub theory: Option<PathBuf>,
    /// Fixed-point file.
    #[arg(long)]
    pub point: Option<PathBuf>,
    /// A catalog entry instead of files.
    #[arg(long)]
    pub builtin: Option<String>,
}

/// The two constituents of a slant sum.
#[derive(Args, Debug, Clone, Default)]
pub struct SumInput {
    /// A catalog slant sum instead of files.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub point1: Option<PathBuf>,
    #[arg(long)]
    pub point2: Option<PathBuf>,
    #[arg(long)]
    pub theory1: Option<PathBuf>,
    #[arg(long)]
    pub theory2: Option<PathBuf>,
    /// Vertex label of the first theory.
    #[arg(long)]
    pub star1: Option<String>,
    /// Framed vertex label of the second theory.
    #[arg(long)]
    pub star2: Option<String>,
    /// Chamber as comma-separated positions, smallest weight first.
    #[arg(long)]
    pub chamber: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    General,
    #[value(name = "q=hbar")]
    QEqualsHbar,
    #[value(name = "w=1")]
    SingleFraming,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShiftArg {
    Inverse,
    Forward,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegArg {
    Exact,
    Limit,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Positive real roots up to a height.
    Roots {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        height: i64,
    },
    /// Roots pairing negatively with μ, and the raising word.
    Pairings {
        #[command(flatten)]
        input: Input,
    },
    /// Dimension of the quiver variety.
    Dim {
        #[command(flatten)]
        input: Input,
    },
    /// Dimension identity on one theory, or on a generated corpus.
    Dimcheck {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        corpus: Option<usize>,
    },
    /// Tangent character from roots (and from the fixed point when given).
    Tangent {
        #[command(flatten)]
        input: Input,
    },
    /// Graded character series.
    Gtchar {
        #[command(flatten)]
        input: Input,
    },
    /// Tangent character of a convolution; each component is `w/v` with
    /// comma-separated entries.
    Convtangent {
        #[command(flatten)]
        input: Input,
        #[arg(long = "component", required = true)]
        components: Vec<String>,
    },
    /// Vertex series at a sample point.
    Vertex {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        normalized: bool,
        /// `label:s1,s2;label:...` on framing slots.
        #[arg(long)]
        twist: Option<String>,
        /// Descendant file: `{"label": [["coeff", [e1, e2, ...]], ...]}`.
        #[arg(long)]
        descendant: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ShiftArg::Inverse)]
        shift: ShiftArg,
        #[arg(long, value_enum, default_value_t = RegArg::Limit)]
        regularization: RegArg,
    },
    /// Slant sum of two theories, and of two fixed points when given.
    Slantsum {
        #[command(flatten)]
        input: SumInput,
    },
    Check {
        #[command(subcommand)]
        check: CheckCommand,
        /// Append the report to this ledger.
        #[arg(long, global = true)]
        ledger: Option<PathBuf>,
    },
    /// Run a batch of checks from a config file into a ledger.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        ledger: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    Conjecture {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        dual: bool,
    },
    Branching {
        #[command(flatten)]
        input: SumInput,
        #[arg(long, value_enum, default_value_t = ShiftArg::Inverse)]
        shift: ShiftArg,
    },
    Factorization {
        #[command(flatten)]
        input: SumInput,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        normalized: bool,
        #[arg(long, value_enum, default_value_t = ShiftArg::Inverse)]
        shift: ShiftArg,
    },
    Twistshift {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        twist: String,
    },
    Ruijsenaars {
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
}

/// One entry of a sweep config.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepItem {
    pub check: String,
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub variant: Option<FactorizationVariant>,
    #[serde(default)]
    pub normalized: bool,
    #[serde(default)]
    pub twist: Option<String>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub checks: Vec<SweepItem>,
}

impl From<ShiftArg> for DescendantShift {
    fn from(s: ShiftArg) -> Self {
        match s {
            ShiftArg::Inverse => DescendantShift::Inverse,
            ShiftArg::Forward => DescendantShift::Forward,
        }
    }
}

impl From<VariantArg> for FactorizationVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::General => FactorizationVariant::General,
            VariantArg::QEqualsHbar => FactorizationVariant::QEqualsHbar,
            VariantArg::SingleFraming => FactorizationVariant::SingleFraming,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Pole(_) | Error::NonTruncating(_) => 1,
        _ => EXIT_INPUT,
    }
}

impl Input {
    fn theory(&self) -> Result<QuiverGaugeTheory> {
        if let Some(b) = &self.builtin {
            return catalog::builtin_theory(b);
        }
        if let Some(t) = &self.theory {
            return io::load_theory(t);
        }
        if let Some(p) = &self.point {
            return Ok(io::load_point(p)?.theory);
        }
        Err(usage("give --theory, --point or --builtin"))
    }

    /// The fixed point; zero-dimensional theories without one use their
    /// unique point.
    fn point(&self) -> Result<FixedPointData> {
        if let Some(b) = &self.builtin {
            return catalog::builtin_point(b);
        }
        if let Some(p) = &self.point {
            let p = io::load_point(p)?;
            if let Some(t) = &self.theory {
                if io::load_theory(t)? != p.theory {
                    return Err(Error::Invalid("--point does not belong to --theory".into()));
                }
            }
            return Ok(p);
        }
        let t = self.theory()?;
        if t.dim() == 0 {
            return zero_dim_point(&t);
        }
        Err(usage(
            "a fixed point is needed (--point) for a positive-dimensional theory",
        ))
    }
}

fn parse_chamber(s: Option<&str>, n: usize) -> Result<Chamber> {
    match s {
        None => Ok(Chamber::identity(n)),
        Some(s) => {
            let order = s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("bad chamber `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            Chamber::new(order)
        }
    }
}

impl SumInput {
    fn instance(&self) -> Result<SlantSumInstance> {
        if let Some(b) = &self.builtin {
            return catalog::builtin_instance(b);
        }
        let (p1, p2) = match (&self.point1, &self.point2) {
            (Some(a), Some(b)) => (io::load_point(a)?, io::load_point(b)?),
            _ => return Err(usage("give --builtin or both --point1 and --point2")),
        };
        let spec = self.spec(p1.theory.clone(), p2.theory.clone())?;
        let chamber = parse_chamber(self.chamber.as_deref(), spec.first.v()[spec.star1] as usize)?;
        Ok(SlantSumInstance::new(spec, p1, chamber, p2))
    }

    fn spec(&self, t1: QuiverGaugeTheory, t2: QuiverGaugeTheory) -> Result<SlantSumSpec> {
        let s1 = self
            .star1
            .as_deref()
            .ok_or_else(|| usage("--star1 is required"))?;
        let s2 = self
            .star2
            .as_deref()
            .ok_or_else(|| usage("--star2 is required"))?;
        SlantSumSpec::by_labels(t1, s1, t2, s2)
    }
}

/// `label:s1,s2;label:...`.
pub fn parse_twist(t: &QuiverGaugeTheory, s: &str) -> Result<Twist> {
    let mut tw = Twist::zero(t);
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (label, vals) = part
            .split_once(':')
            .ok_or_else(|| usage(format!("twist entry `{part}` is not label:values")))?;
        let i = t.index(label.trim())?;
        let vals = vals
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| usage(format!("bad twist value in `{part}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != t.w()[i] as usize {
            return Err(usage(format!(
                "vertex {} has {} framing slots but the twist gives {}",
                label.trim(),
                t.w()[i],
                vals.len()
            )));
        }
        tw.0[i] = vals;
    }
    Ok(tw)
}

pub fn load_descendant(t: &QuiverGaugeTheory, path: &Path) -> Result<Descendant> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let o = v
        .as_object()
        .ok_or_else(|| Error::Schema("descendant must be an object".into()))?;
    let mut d = Descendant::one();
    for (label, terms) in o {
        let i = t.index(label)?;
        let mut list = Vec::new();
        for term in terms
            .as_array()
            .ok_or_else(|| Error::Schema("descendant terms must be a list".into()))?
        {
            let (c, e): (String, Vec<i64>) = serde_json::from_value(term.clone()).map_err(|_| {
                Error::Schema(format!("descendant term {term} is not [\"coeff\", [exponents]]"))
            })?;
            if e.len() != t.v()[i] as usize {
                return Err(Error::Schema(format!(
                    "descendant at {label} needs {} exponents",
                    t.v()[i]
                )));
            }
            list.push((parse_rational(&c)?, e));
        }
        d = d.with_vertex(i, &list)?;
    }
    Ok(d)
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("bad integer list `{s}`")))
        })
        .collect()
}

fn sample_json(s: &SamplePoint) -> Value {
    let a: serde_json::Map<String, Value> = s
        .framing_values()
        .iter()
        .map(|(k, v)| (k.key(), json!(format_rational(v))))
        .collect();
    json!({ "seed": s.seed, "q": format_rational(s.q()), "hbar": format_rational(s.hbar()), "a": a })
}

fn terms_json(terms: &[CharacterTerm]) -> Value {
    json!(terms
        .iter()
        .map(|t| json!({"hbar": t.hbar, "root": t.root.0}))
        .collect::<Vec<_>>())
}

fn terms_text(terms: &[CharacterTerm]) -> String {
    let parts: Vec<String> = terms.iter().map(|t| t.display()).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// What a command produced.
enum Output {
    Text(String, Value),
    Report(CheckReport),
}

struct Runner<'a> {
    g: &'a Global,
}

impl Runner<'_> {
    fn seeds(&self) -> Vec<u64> {
        seeds_from(self.g.seed, self.g.samples.max(1))
    }

    fn sample(&self, vars: &[crate::FramingVar]) -> SamplePoint {
        if self.g.q_equals_hbar {
            SamplePoint::q_equals_hbar(self.g.seed, vars)
        } else {
            SamplePoint::new(self.g.seed, vars)
        }
    }

    fn run(&self, cmd: &Command) -> Result<Output> {
        let g = self.g;
        match cmd {
            Command::Roots { input, height } => {
                let t = input.theory()?;
                let roots = positive_real_roots(&t.cartan(), *height);
                let text = roots.iter().map(|r| r.display()).collect::<Vec<_>>().join("\n");
                let js = json!(roots.iter().map(|r| r.0.clone()).collect::<Vec<_>>());
                Ok(Output::Text(text, js))
            }
            Command::Pairings { input } => {
                let t = input.theory()?;
                let r = extremal_word(&t.weight_context());
                let mut text = format!("in orbit: {}\nword: {:?}\n", r.in_orbit, r.word);
                for (a, p) in &r.roots {
                    text.push_str(&format!("{}  (α,μ) = {p}\n", a.display()));
                }
                Ok(Output::Text(
                    text.trim_end().to_string(),
                    serde_json::to_value(&r)?,
                ))
            }
            Command::Dim { input } => {
                let t = input.theory()?;
                let d = quiver_variety_dim(&t.weight_context());
                Ok(Output::Text(d.to_string(), json!({ "dim": d })))
            }
            Command::Dimcheck { input, corpus } => {
                if let Some(n) = corpus {
                    return Ok(Output::Report(check_dim_corpus(*n, g.seed)));
                }
                let t = input.theory()?;
                let ok = dim_identity_check(&t.weight_context());
                let (mut rep, t0) = CheckReport::start("dimcheck", 0);
                rep.seeds.push(g.seed);
                if !ok {
                    rep.notes
                        .push("dimension identity fails or μ is not in the Weyl orbit".into());
                    rep.status = Status::Fail;
                }
                rep.elapsed_ms = t0.elapsed().as_millis() as u64;
                Ok(Output::Report(rep))
            }
            Command::Tangent { input } => {
                let t = input.theory()?;
                let (mut text, mut js) = match dual_tangent_character(&t.weight_context()) {
                    Ok(terms) => (
                        format!("{} terms\n{}", terms.len(), terms_text(&terms)),
                        json!({ "terms": terms_json(&terms) }),
                    ),
                    Err(e) if input.point.is_some() || input.builtin.is_some() => {
                        (format!("from roots: {e}"), json!({ "terms": null }))
                    }
                    Err(e) => return Err(e),
                };
                if input.point.is_some() || input.builtin.is_some() {
                    let p = input.point()?;
                    let tc = tangent_character(&p);
                    let parts: Vec<String> = tc
                        .iter()
                        .map(|(m, k)| format!("{k}·{}", m.display(g.kappa)))
                        .collect();
                    let shown = if parts.is_empty() {
                        "0".to_string()
                    } else {
                        parts.join(" + ")
                    };
                    text.push_str(&format!("\nat the fixed point: {shown}"));
                    js["fixed_point"] = json!(tc
                        .iter()
                        .map(|(m, k)| json!([io::monomial_to_value(m), k]))
                        .collect::<Vec<_>>());
                }
                Ok(Output::Text(text, js))
            }
            Command::Gtchar { input } => {
                let t = input.theory()?;
                let s = gt_character(&t.weight_context(), g.order)?;
                Ok(Output::Text(s.to_text(), io::series_to_value(&s)))
            }
            Command::Convtangent { input, components } => {
                let t = input.theory()?;
                let comps = components
                    .iter()
                    .map(|c| {
                        let (w, v) = c
                            .split_once('/')
                            .ok_or_else(|| usage(format!("component `{c}` is not w/v")))?;
                        let (w, v) = (parse_list(w)?, parse_list(v)?);
                        if w.len() != t.n() || v.len() != t.n() {
                            return Err(usage(format!(
                                "component `{c}` needs {} entries on each side",
                                t.n()
                            )));
                        }
                        Ok((w, v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let terms = convolution_tangent_character(&t.cartan(), &comps)?;
                Ok(Output::Text(
                    format!("{} terms\n{}", terms.len(), terms_text(&terms)),
                    json!({ "terms": terms_json(&terms) }),
                ))
            }
            Command::Vertex {
                input,
                normalized,
                twist,
                descendant,
                shift,
                regularization,
            } => {
                let p = input.point()?;
                let mut opts = VertexOptions::new(g.order)
                    .normalized(*normalized)
                    .shift((*shift).into())
                    .regularization(match regularization {
                        RegArg::Exact => Regularization::Exact,
                        RegArg::Limit => Regularization::Limit,
                    });
                if let Some(tw) = twist {
                    opts = opts.twist(parse_twist(&p.theory, tw)?);
                }
                if let Some(d) = descendant {
                    opts = opts.descendant(load_descendant(&p.theory, d)?);
                }
                let s = self.sample(&p.framing_vars());
                let v = vertex(&p, &opts, &s)?;
                let js = json!({ "sample": sample_json(&s), "series": io::series_to_value(&v) });
                let head = format!(
                    "q = {}, ħ = {}",
                    format_rational(s.q()),
                    format_rational(s.hbar())
                );
                Ok(Output::Text(format!("{head}\n{}", v.to_text()), js))
            }
            Command::Slantsum { input } => {
                if input.builtin.is_some() || (input.point1.is_some() && input.point2.is_some()) {
                    let inst = input.instance()?;
                    let p = slant_sum_fixed_point(&inst.spec, &inst.p1, &inst.chamber, &inst.p2)?;
                    let js = io::point_to_value(&p);
                    return Ok(Output::Text(serde_json::to_string_pretty(&js)?, js));
                }
                let (t1, t2) = match (&input.theory1, &input.theory2) {
                    (Some(a), Some(b)) => (io::load_theory(a)?, io::load_theory(b)?),
                    _ => return Err(usage("give --builtin, --point1/--point2 or --theory1/--theory2")),
                };
                let t = slant_sum(&input.spec(t1, t2)?)?;
                let js = io::theory_to_value(&t);
                Ok(Output::Text(serde_json::to_string_pretty(&js)?, js))
            }
            Command::Check { check, .. } => Ok(Output::Report(self.check(check)?)),
            Command::Sweep { .. } => Err(usage("sweep is handled by the driver")),
        }
    }

    fn check(&self, check: &CheckCommand) -> Result<CheckReport> {
        let g = self.g;
        let seeds = self.seeds();
        Ok(match check {
            CheckCommand::Conjecture { input, dual } => {
                let form = if *dual {
                    ConjectureForm::Dual
                } else {
                    ConjectureForm::Primary
                };
                check_zero_dim_conjecture(&input.point()?, g.order, &seeds, form)
            }
            CheckCommand::Branching { input, shift } => {
                check_branching(&input.instance()?, g.order, &seeds, (*shift).into())
            }
            CheckCommand::Factorization {
                input,
                variant,
                normalized,
                shift,
            } => {
                let variant = match (variant, g.q_equals_hbar) {
                    (Some(v), _) => (*v).into(),
                    (None, true) => FactorizationVariant::QEqualsHbar,
                    (None, false) => FactorizationVariant::General,
                };
                check_factorization(
                    &input.instance()?,
                    variant,
                    g.order,
                    &seeds,
                    (*shift).into(),
                    *normalized,
                )
            }
            CheckCommand::Twistshift { input, twist } => {
                let p = input.point()?;
                let tw = parse_twist(&p.theory, twist)?;
                twisted_vs_shift_check(&p, &tw, g.order, &seeds)
            }
            CheckCommand::Ruijsenaars { n } => check_ruijsenaars(*n, g.order, &seeds),
        })
    }

    fn sweep_item(&self, item: &SweepItem) -> Result<CheckReport> {
        let g = Global {
            order: item.order.unwrap_or(self.g.order),
            seed: item.seed.unwrap_or(self.g.seed),
            samples: item.samples.unwrap_or(self.g.samples),
            ..self.g.clone()
        };
        let runner = Runner { g: &g };
        let input = Input {
            builtin: item.builtin.clone(),
            ..Default::default()
        };
        let sum = SumInput {
            builtin: item.builtin.clone(),
            ..Default::default()
        };
        let cmd = match item.check.as_str() {
            "conjecture" => CheckCommand::Conjecture { input, dual: false },
            "branching" => CheckCommand::Branching {
                input: sum,
                shift: ShiftArg::Inverse,
            },
            "factorization" => {
                let v = item.variant.unwrap_or_default();
                return Ok(check_factorization(
                    &sum.instance()?,
                    v,
                    g.order,
                    &runner.seeds(),
                    DescendantShift::Inverse,
                    item.normalized,
                ));
            }
            "twistshift" => CheckCommand::Twistshift {
                input,
                twist: item
                    .twist
                    .clone()
                    .ok_or_else(|| usage("twistshift needs `twist`"))?,
            },
            "ruijsenaars" => CheckCommand::Ruijsenaars {
                n: item.n.unwrap_or(3),
            },
            "dimcorpus" => return Ok(check_dim_corpus(item.count.unwrap_or(50), g.seed)),
            other => return Err(usage(format!("unknown check `{other}`"))),
        };
        runner.check(&cmd)
    }
}

fn report_text(r: &CheckReport) -> String {
    let mut s = r.summary();
    for m in r.mismatches.iter().skip(1) {
        s.push_str(&format!(
            "\n  z^{:?} seed {}: {} vs {}",
            m.exponent, m.seed, m.lhs, m.rhs
        ));
    }
    s
}

fn emit(out: &mut dyn Write, g: &Global, text: &str, js: &Value) -> Result<()> {
    match g.format {
        Format::Text => writeln!(out, "{text}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(js)?)?,
    }
    Ok(())
}

fn sweep(
    runner: &Runner,
    pool: &rayon::ThreadPool,
    config: &Path,
    ledger: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let cfg: SweepConfig = serde_json::from_str(&std::fs::read_to_string(config)?)
        .map_err(|e| Error::Schema(format!("{}: {e}", config.display())))?;
    let reports: Vec<Result<CheckReport>> =
        pool.install(|| cfg.checks.par_iter().map(|i| runner.sweep_item(i)).collect());
    let ledger = Ledger::new(ledger);
    let mut worst = 0;
    for r in reports {
        let r = r?;
        ledger.append(&r)?;
        worst = worst.max(r.status.exit_code());
        let js = serde_json::to_value(&r)?;
        emit(out, runner.g, &report_text(&r), &js)?;
    }
    Ok(worst)
}

/// Run with explicit arguments, writing to `out`; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let runner = Runner { g: &cli.global };
    let result = match &cli.command {
        Command::Sweep { config, ledger } => sweep(&runner, &pool, config, ledger, out),
        cmd => pool.install(|| runner.run(cmd)).and_then(|o| match o {
            Output::Text(text, js) => emit(out, &cli.global, &text, &js).map(|_| 0),
            Output::Report(r) => {
                if let Command::Check { ledger: Some(l), .. } = cmd {
                    Ledger::new(l).append(&r)?;
                }
                let js = serde_json::to_value(&r)?;
                emit(out, &cli.global, &report_text(&r), &js)?;
                Ok(r.status.exit_code())
            }
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_of(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
