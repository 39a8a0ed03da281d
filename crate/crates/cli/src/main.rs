//! `integrable`: command-line access to the catalog, the residual checks and the classifiers.
//!
//! Standard output carries JSON only; diagnostics go to standard error.
//! Exit status is 0 on success, 1 when a check fails or an input is not a solution,
//! and 2 on usage errors.

use std::cell::OnceCell;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use integrable::catalog::{
    apply_transformation, instantiate, instantiate_b2, list_families, parse_record, regular_families, Family,
    FamilyInfo, FamilyInstance, RankRule,
};
use integrable::funceq::{
    ani_residual, b2_residual, bn_residual_all, classify_b2, classify_bn, regular_everywhere, solve_vw_linear,
    uijk_residual, ATriple, B2Tuple, BnSolution, ResidualReport,
};
use integrable::operator::build_pq_b2;
use integrable::rational::parse_rational_list;
use integrable::{Error, ExpSum};

#[derive(Parser)]
#[command(name = "integrable", version, about = "Exact checks for integrable Schrödinger potentials of type B_n")]
struct Cli {
    /// Write the JSON result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the family tags valid at a rank.
    CatalogList {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Only the families regular at every wall.
        #[arg(long)]
        regular: bool,
    },
    /// Describe one family, with its potential when parameters are given.
    CatalogShow(Source),
    /// Expand a family instance into root-function series.
    Instantiate {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 16)]
        order: i64,
    },
    /// Type A residuals of a triple read from `--input`.
    VerifyA {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 12)]
        order: i64,
    },
    /// Rank-two functional equation.
    VerifyB2 {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 16)]
        order: i64,
    },
    /// Pairwise rank-two equations of a rank `n` solution.
    VerifyBn {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 12)]
        order: i64,
    },
    /// Builds `P` and its fourth-order partner `Q` and checks `[P,Q] = 0` and `Q` symmetric.
    CommutatorCheck {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 16)]
        order: i64,
    },
    /// All `(V, W)` compatible with the `U±` of the input.
    SolveVw {
        #[command(flatten)]
        src: Source,
        /// Largest exponent of `V` and `W`, in half-units.
        #[arg(long, default_value_t = 8)]
        support: i64,
    },
    /// Apply standard transformations to a rank-two solution.
    Transform {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 16)]
        order: i64,
    },
    /// Recognize a solution as a transformed catalog family.
    Classify {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 16)]
        order: i64,
    },
    /// Whether every root function has a regular singularity at its wall.
    RegularCheck {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 96)]
        order: i64,
    },
}

/// Either a catalog instance or a JSON file.
#[derive(Args)]
struct Source {
    #[arg(long, alias = "tag")]
    family: Option<Family>,
    /// Comma-separated rationals, `p/q` allowed. Extra entries are ignored.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// The integer lattice scale of the instance.
    #[arg(long, default_value_t = 1)]
    scale: i64,
    /// JSON input; `-` reads standard input. An `instantiate` result is accepted as is.
    #[arg(long, conflicts_with = "family")]
    input: Option<PathBuf>,
    /// Comma-separated moves, e.g. `dual,translate:2:3,scale:2,reflect-y`.
    #[arg(long)]
    transform: Option<String>,
    #[arg(skip)]
    loaded: OnceCell<Value>,
}

enum Fail {
    Usage(String),
    Check(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::NotASolution | Error::Unrecognized(_) | Error::ObstructedIntegration(_) | Error::InconsistentPair(_) => {
                Fail::Check(e.to_string())
            }
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, bool), Fail>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail::Usage(msg.into()))
}

fn ceiling(order: i64) -> Result<i64, Fail> {
    if order <= 0 {
        return usage("--order must be positive");
    }
    Ok(2 * order)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

impl Source {
    fn family(&self) -> Result<Family, Fail> {
        self.family.ok_or_else(|| Fail::Usage("give --family or --input".into()))
    }

    fn rank_for(&self, f: Family) -> usize {
        self.rank.unwrap_or(if f.rank_rule() == RankRule::Two { 2 } else { 3 })
    }

    fn instance(&self) -> Result<FamilyInstance, Fail> {
        let f = self.family()?;
        let params = match &self.params {
            Some(p) => parse_rational_list(p)?,
            None if f.param_count() == 0 => Vec::new(),
            None => return usage(format!("{f} takes {} parameters; give --params", f.param_count())),
        };
        Ok(FamilyInstance::truncated(f, self.rank_for(f), &params, self.scale))
    }

    fn raw(&self) -> Result<Option<Value>, Fail> {
        let Some(path) = &self.input else { return Ok(None) };
        if let Some(v) = self.loaded.get() {
            return Ok(Some(v.clone()));
        }
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Fail::Usage(format!("stdin: {e}")))?;
            s
        } else {
            fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?
        };
        let mut v: Value = serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
        // accept the output of `instantiate` as is
        if let Some(inner) = v.get_mut("solution") {
            v = inner.take();
        }
        Ok(Some(self.loaded.get_or_init(|| v).clone()))
    }

    fn parse<T: DeserializeOwned>(v: Value) -> Result<T, Fail> {
        serde_json::from_value(v).map_err(|e| Fail::Usage(format!("input: {e}")))
    }

    fn input<T: DeserializeOwned>(&self) -> Result<Option<T>, Fail> {
        self.raw()?.map(Self::parse).transpose()
    }

    fn record(&self) -> Result<Vec<integrable::catalog::Atom>, Fail> {
        Ok(parse_record(self.transform.as_deref().unwrap_or(""))?)
    }

    /// A rank-two solution at rank-one ceiling `c`, with `--transform` applied.
    fn b2(&self, c: i64) -> Result<B2Tuple, Fail> {
        let t = match self.input()? {
            Some(t) => t,
            None => B2Tuple::from_potential(&instantiate_b2(&self.instance()?)?, c)?,
        };
        Ok(apply_transformation(&self.record()?, &t)?)
    }

    fn bn(&self, c: i64) -> Result<BnSolution, Fail> {
        if self.transform.is_some() {
            return usage("--transform applies to rank-two solutions only");
        }
        match self.input()? {
            Some(s) => Ok(s),
            None => Ok(BnSolution::from_spec(&instantiate(&self.instance()?)?, c)?),
        }
    }

    /// Decides between rank two and higher rank from the family or the input's keys.
    fn is_b2(&self) -> Result<bool, Fail> {
        if let Some(v) = self.raw()? {
            return Ok(v.get("uplus").is_some());
        }
        let f = self.family()?;
        Ok(self.rank_for(f) == 2)
    }
}

fn live_ceiling(parts: &[&ExpSum]) -> Option<i64> {
    parts.iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).min()
}

fn report(r: ResidualReport) -> Outcome {
    let ok = r.ok;
    Ok((to_json(&r), ok))
}

fn catalog_show(src: &Source) -> Outcome {
    let f = src.family()?;
    let n = src.rank_for(f);
    if !f.valid_at(n) {
        return usage(format!("{f} is not defined at rank {n}"));
    }
    let mut out = to_json(&FamilyInfo::of(f, n));
    if src.params.is_some() || f.param_count() == 0 {
        let inst = src.instance()?;
        out["potential"] = to_json(&instantiate(&inst)?);
        out["instance"] = to_json(&inst);
    }
    Ok((out, true))
}

fn instantiate_cmd(src: &Source, order: i64) -> Outcome {
    let c = ceiling(order)?;
    let inst = src.instance()?;
    let spec = instantiate(&inst)?;
    let solution = if inst.rank == 2 { to_json(&src.b2(c)?) } else { to_json(&src.bn(c)?) };
    Ok((json!({ "instance": inst, "potential": spec, "solution": solution }), true))
}

fn verify_a(src: &Source, order: i64) -> Outcome {
    let Some(t) = src.input::<ATriple>()? else { return usage("verify-a needs --input") };
    let w = live_ceiling(&[&t.uij, &t.ujk, &t.uik]).map_or(ceiling(order)?, |c| c.min(2 * order));
    report(ResidualReport::merge([ani_residual(&t, w)?, uijk_residual(&t, w)?]))
}

fn verify_b2(src: &Source, order: i64) -> Outcome {
    let c = ceiling(order)?;
    let t = src.b2(c)?;
    let w = live_ceiling(&t.components()).map_or(c, |l| l.min(c));
    report(b2_residual(&t, w)?)
}

fn verify_bn(src: &Source, order: i64) -> Outcome {
    let c = ceiling(order)?;
    report(bn_residual_all(&src.bn(c)?, c)?)
}

fn commutator_check(src: &Source, order: i64) -> Outcome {
    let c = ceiling(order)?;
    let data = match (src.input::<B2Tuple>()?, src.transform.is_some()) {
        (None, false) => instantiate_b2(&src.instance()?)?.data(c)?,
        _ => src.b2(c)?.to_data(),
    };
    let (p, q) = build_pq_b2(&data)?;
    let commutes = p.commutator(&q)?.is_zero();
    let symmetric = q.adjoint().agrees_with(&q);
    let ok = commutes && symmetric;
    Ok((json!({ "ok": ok, "commutes": commutes, "symmetric": symmetric, "ceiling": p.ceiling() }), ok))
}

#[derive(Deserialize)]
struct USide {
    uplus: ExpSum,
    uminus: ExpSum,
}

fn solve_vw(src: &Source, support: i64) -> Outcome {
    let (up, um) = match src.input::<USide>()? {
        Some(u) => (u.uplus, u.uminus),
        None => {
            let t = src.b2(8 * support.max(1))?;
            (t.uplus, t.uminus)
        }
    };
    let basis = solve_vw_linear(&up, &um, support)?;
    let basis: Vec<Value> = basis.iter().map(|(v, w)| json!({ "v": v, "w": w })).collect();
    Ok((json!({ "dimension": basis.len(), "support": support, "basis": basis }), true))
}

fn transform(src: &Source, order: i64) -> Outcome {
    if src.transform.is_none() {
        return usage("transform needs --transform");
    }
    Ok((to_json(&src.b2(ceiling(order)?)?), true))
}

fn classify(src: &Source, order: i64) -> Outcome {
    let c = ceiling(order)?;
    let comps = if src.is_b2()? {
        let found = classify_b2(&src.b2(3 * c)?, c)?;
        let mut v = to_json(&found);
        v["roots"] = json!([[1, 1], [1, -1], [1, 0], [0, 1]]);
        vec![v]
    } else {
        classify_bn(&src.bn(3 * c)?, c)?.iter().map(to_json).collect()
    };
    Ok((json!({ "components": comps }), true))
}

fn regular_check(src: &Source, order: i64) -> Outcome {
    let sol = src.bn(ceiling(order)?)?;
    let regular = regular_everywhere(&sol);
    Ok((json!({ "regular": regular }), regular))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Cmd::CatalogList { rank, regular } => {
            let tags = if *regular { regular_families(*rank) } else { list_families(*rank) };
            Ok((to_json(&tags.into_iter().map(|f| FamilyInfo::of(f, *rank)).collect::<Vec<_>>()), true))
        }
        Cmd::CatalogShow(src) => catalog_show(src),
        Cmd::Instantiate { src, order } => instantiate_cmd(src, *order),
        Cmd::VerifyA { src, order } => verify_a(src, *order),
        Cmd::VerifyB2 { src, order } => verify_b2(src, *order),
        Cmd::VerifyBn { src, order } => verify_bn(src, *order),
        Cmd::CommutatorCheck { src, order } => commutator_check(src, *order),
        Cmd::SolveVw { src, support } => solve_vw(src, *support),
        Cmd::Transform { src, order } => transform(src, *order),
        Cmd::Classify { src, order } => classify(src, *order),
        Cmd::RegularCheck { src, order } => regular_check(src, *order),
    }
}

fn emit(cli: &Cli, v: &Value) -> io::Result<()> {
    // without serde_json's preserve_order, object keys come out sorted
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok((v, ok)) => (v, if ok { 0 } else { 1 }),
        Err(Fail::Check(msg)) => {
            eprintln!("integrable: {msg}");
            (json!({ "ok": false, "error": msg }), 1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("integrable: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("integrable: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
