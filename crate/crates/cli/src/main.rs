use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use freecat::automorphism::{
    check_functor, check_generators, decide_inner_via_central, derived_equals_star, extract_s,
    reduction_check, s_family_laws, verify_conjugation, AutomorphismSpec, BijectionFamily,
    CheckReport, InnerSearch, InnerVerdict, ReductionScenario, SpecKind, Status,
};
use freecat::category::{random_morphism, FreeObject, Morphism};
use freecat::derived::{solve_term_equations, EquationSystem, TermAssignment};
use freecat::finite::{
    check_automorphisms_inner, check_certificate, is_left_indicator, is_right_indicator,
    load_universe, transformation_monoid, FiniteAlgebra, IndicatorResult, Side,
    DEFAULT_MAX_CARRIER, DEFAULT_MONOID_CAP,
};
use freecat::{
    enumerate_terms, equal_in_free, munn_tree, normalize, parse_term, Error, Signature, Variety,
    DEFAULT_CAP,
};

#[derive(Parser)]
#[command(
    name = "freecat",
    version,
    about = "Free algebras, their categories, and bounded automorphism checks"
)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ceiling on enumerated candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Word problems in free algebras.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Term enumeration.
    #[command(subcommand)]
    Terms(TermsCmd),
    /// Solve an equation system for derived operations.
    Solve {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
    },
    /// Compare the conjugated operations with the derived ones.
    #[command(subcommand)]
    Derive(DeriveCmd),
    /// Functor, conjugation and s-family checks for a spec.
    #[command(subcommand)]
    Category(CategoryCmd),
    /// Inner-ness and reduction checks.
    #[command(subcommand)]
    Auto(AutoCmd),
    /// Brute-force indicator checks over finite algebras.
    #[command(subcommand)]
    Indicator(IndicatorCmd),
    /// Transformation monoids.
    #[command(subcommand)]
    Monoid(MonoidCmd),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Decide whether two terms are equal in the free algebra.
    Eq {
        #[arg(long)]
        variety: Variety,
        lhs: String,
        rhs: String,
    },
    /// Print the normal form of a term.
    Normalize {
        #[arg(long)]
        variety: Variety,
        term: String,
    },
    /// Print the Munn tree of an inverse-semigroup term.
    Munn { term: String },
}

#[derive(Subcommand)]
enum TermsCmd {
    /// List every term up to a size, in canonical order.
    Enumerate {
        #[arg(
            long,
            conflicts_with = "signature",
            required_unless_present = "signature"
        )]
        variety: Option<Variety>,
        /// TOML file with `[[op]]` entries.
        #[arg(long)]
        signature: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        vars: u32,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

#[derive(Subcommand)]
enum DeriveCmd {
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        rank: u32,
        /// Largest argument size probed.
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Largest term size of sampled images.
    #[arg(long, default_value_t = 6)]
    sample_size: usize,
    /// Elements of this size or less are probed pointwise.
    #[arg(long, default_value_t = 2)]
    probe_size: usize,
}

#[derive(Subcommand)]
enum CategoryCmd {
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Family JSON for s; defaults to the rule implied by the spec.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        ranks: Vec<u32>,
        /// Table bound for s and its laws.
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[command(flatten)]
        sampling: SampleArgs,
    },
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Search for a central family making the spec inner.
    Inner {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
        /// JSON object from operation names to terms; derived from the spec when absent.
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        term_size: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        probe_size: usize,
    },
    /// Check the reduction conditions and, when they hold, the conclusion.
    Reduction {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        rank: u32,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
    },
}

#[derive(Args)]
struct IndicatorArgs {
    #[arg(long)]
    a0: PathBuf,
    /// A directory of .tbl files or a single file.
    #[arg(long)]
    universe: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CARRIER)]
    max_carrier: usize,
}

#[derive(Subcommand)]
enum IndicatorCmd {
    Right(IndicatorArgs),
    Left(IndicatorArgs),
}

#[derive(Args)]
struct MonoidArgs {
    #[arg(long)]
    n: usize,
    /// Partial instead of total transformations.
    #[arg(long)]
    partial: bool,
    #[arg(long, default_value_t = DEFAULT_MONOID_CAP)]
    max_elements: u128,
}

#[derive(Subcommand)]
enum MonoidCmd {
    /// Build the monoid and print it as a table file.
    Build(MonoidArgs),
    /// Check that every automorphism is conjugation by a permutation.
    AutCheck {
        #[command(flatten)]
        monoid: MonoidArgs,
        /// Also compare against an exhaustive bijection search.
        #[arg(long)]
        exhaustive: bool,
    },
}

struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

impl Outcome {
    fn from_report(report: &CheckReport, mut json: Value, text: String) -> Outcome {
        json["status"] = json!(report.status());
        json["report"] = report.to_json();
        Outcome {
            code: status_code(report.status()),
            text: format!("{text}{report}"),
            json,
        }
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Pass | Status::Skipped => 0,
        Status::Fail => 1,
        Status::Gap => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("report serializes")
                );
            } else {
                print!("{}", out.text);
                if !out.text.ends_with('\n') {
                    println!();
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = if e.is_cap() { 3 } else { 2 };
            if cli.json {
                println!(
                    "{}",
                    json!({ "error": e.to_string(), "inconclusive": e.is_cap() })
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> freecat::Result<Outcome> {
    match &cli.command {
        Command::Oracle(c) => oracle(c),
        Command::Terms(TermsCmd::Enumerate {
            variety,
            signature,
            vars,
            max_size,
        }) => {
            let sig = match (variety, signature) {
                (Some(v), _) => v.signature().clone(),
                (None, Some(p)) => Signature::from_toml(&read(p)?)?,
                (None, None) => return Err(Error::Invalid("give --variety or --signature".into())),
            };
            let vs: Vec<u32> = (1..=*vars).collect();
            let terms = enumerate_terms(&sig, &vs, *max_size, cli.cap)?;
            let rendered: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
            Ok(Outcome {
                code: 0,
                text: rendered.join("\n"),
                json: json!({
                    "bounds": { "max_size": max_size, "vars": vars, "cap": cli.cap.to_string() },
                    "count": rendered.len(),
                    "terms": rendered,
                }),
            })
        }
        Command::Solve { system, max_size } => {
            let sys = EquationSystem::load(system)?;
            let sols = solve_term_equations(&sys, *max_size, cli.cap)?;
            let mut text = format!(
                "{}: {} solution(s), {} class(es), complete up to size {max_size}\n",
                sols.system,
                sols.assignments.len(),
                sols.classes()?.len()
            );
            for a in &sols.assignments {
                let _ = writeln!(text, "  {a}");
            }
            let mut json = sols.to_json()?;
            json["bounds"] = json!({ "max_size": max_size, "cap": cli.cap.to_string() });
            Ok(Outcome {
                code: 0,
                text,
                json,
            })
        }
        Command::Derive(DeriveCmd::Check { spec, rank, bound }) => {
            let phi = AutomorphismSpec::load(spec)?;
            let obj = FreeObject::new(phi.variety(), *rank)?;
            let star = derived_equals_star(&phi, obj, *bound, cli.cap)?;
            let text = match &star.assignment {
                Some(a) => format!("derived operations: {a}\n"),
                None => "no derived operations found\n".into(),
            };
            let json = json!({
                "bounds": { "rank": rank, "bound": bound, "cap": cli.cap.to_string() },
                "assignment": star.assignment.as_ref().map(TermAssignment::to_json),
            });
            Ok(Outcome::from_report(&star.report, json, text))
        }
        Command::Category(CategoryCmd::Verify {
            spec,
            family,
            ranks,
            bound,
            sampling,
        }) => category_verify(cli, spec, family.as_deref(), ranks, *bound, sampling),
        Command::Auto(AutoCmd::Inner {
            spec,
            family,
            assignment,
            term_size,
            samples,
            probe_size,
        }) => {
            let phi = AutomorphismSpec::load(spec)?;
            let v = phi.variety();
            let mut search = InnerSearch::new(v, *term_size);
            search.samples = *samples;
            search.probe_size = *probe_size;
            search.seed = cli.seed;
            search.cap = cli.cap;
            let s = family_for(
                &phi,
                family.as_deref(),
                &[1, search.rank],
                *probe_size,
                cli.cap,
            )?;
            let star = match assignment {
                Some(p) => load_assignment(v, p)?,
                None => {
                    let obj = FreeObject::new(v, search.rank)?;
                    let d = derived_equals_star(&phi, obj, *probe_size, cli.cap)?;
                    match d.assignment {
                        Some(a) if d.report.passed() => a,
                        _ => {
                            let json = json!({ "result": { "verdict": "inconclusive", "reason": "no derived operations for the spec" } });
                            return Ok(Outcome::from_report(
                                &d.report,
                                json,
                                "no derived operations for the spec\n".into(),
                            ));
                        }
                    }
                }
            };
            let out = decide_inner_via_central(&phi, &s, &star, &search)?;
            let mut json = out.to_json();
            json["bounds"] = json!({
                "term_size": term_size,
                "rank": search.rank,
                "samples": samples,
                "probe_size": probe_size,
                "seed": cli.seed,
                "cap": cli.cap.to_string(),
            });
            let (code, mut text) = match &out.verdict {
                InnerVerdict::InnerWitness(w) => (
                    0,
                    format!("inner_witness: c = {} after permutation {:?}\n", w.term, w.permutation),
                ),
                InnerVerdict::NotInnerUpToBound { term_size, candidates } => (
                    0,
                    format!("not_inner_up_to_bound: no central candidate among {candidates} unary terms of size <= {term_size}\n"),
                ),
                InnerVerdict::Inconclusive { reason } => (3, format!("inconclusive: {reason}\n")),
            };
            for (test, n) in &out.rejections {
                let _ = writeln!(text, "  rejected by {test}: {n}");
            }
            let _ = write!(text, "{}", out.report);
            Ok(Outcome { code, text, json })
        }
        Command::Auto(AutoCmd::Reduction {
            spec,
            rank,
            max_size,
        }) => {
            let phi = AutomorphismSpec::load(spec)?;
            let sc = ReductionScenario::new(phi.variety(), *rank, *max_size, cli.cap)?;
            let verdict = reduction_check(&phi, &sc)?;
            let json = json!({
                "bounds": { "rank": rank, "max_size": max_size, "cap": cli.cap.to_string() },
                "conditions": verdict.conditions,
                "conclusion": verdict.conclusion,
            });
            let text = format!(
                "conditions: {}; conclusion: {}\n",
                verdict
                    .conditions
                    .iter()
                    .map(|s| format!("{s:?}").to_lowercase())
                    .collect::<Vec<_>>()
                    .join(", "),
                format!("{:?}", verdict.conclusion).to_lowercase()
            );
            Ok(Outcome::from_report(&verdict.report, json, text))
        }
        Command::Indicator(c) => {
            let (side, args) = match c {
                IndicatorCmd::Right(a) => (Side::Right, a),
                IndicatorCmd::Left(a) => (Side::Left, a),
            };
            indicator(side, args)
        }
        Command::Monoid(MonoidCmd::Build(m)) => {
            let mon = transformation_monoid(m.n, m.partial, m.max_elements)?;
            Ok(Outcome {
                code: 0,
                text: mon.algebra.to_tbl(),
                json: json!({
                    "bounds": { "max_elements": m.max_elements.to_string() },
                    "name": mon.algebra.name,
                    "size": mon.elements.len(),
                    "elements": (0..mon.elements.len()).map(|i| mon.show(i)).collect::<Vec<_>>(),
                    "table": mon.algebra.ops[0].table,
                }),
            })
        }
        Command::Monoid(MonoidCmd::AutCheck {
            monoid: m,
            exhaustive,
        }) => {
            let mon = transformation_monoid(m.n, m.partial, m.max_elements)?;
            let r = check_automorphisms_inner(&mon, *exhaustive)?;
            let deltas_ok = r.partial_identities.as_ref().is_none_or(|d| d.holds);
            let ok = r.all_inner && r.full_search_agrees != Some(false) && deltas_ok;
            let mut text = format!(
                "{}: {} automorphism(s), all conjugations by permutations: {}\n",
                mon.algebra.name,
                r.automorphisms.len(),
                r.all_inner
            );
            for a in &r.automorphisms {
                match &a.permutation {
                    Some(p) => {
                        let _ = writeln!(text, "  conjugation by {p:?}");
                    }
                    None => {
                        let _ = writeln!(text, "  no permutation witness for {:?}", a.map);
                    }
                }
            }
            if let Some(agree) = r.full_search_agrees {
                let _ = writeln!(text, "exhaustive search agrees: {agree}");
            }
            if let Some(d) = &r.partial_identities {
                let _ = writeln!(text, "partial identities respected: {}", d.holds);
                if let Some(detail) = &d.detail {
                    let _ = writeln!(text, "  {detail}");
                }
            }
            let mut json = serde_json::to_value(&r).expect("report serializes");
            json["bounds"] = json!({ "max_elements": m.max_elements.to_string() });
            Ok(Outcome {
                code: if ok { 0 } else { 1 },
                text,
                json,
            })
        }
    }
}

fn oracle(c: &OracleCmd) -> freecat::Result<Outcome> {
    match c {
        OracleCmd::Eq { variety, lhs, rhs } => {
            let (l, r) = (variety.parse_term(lhs)?, variety.parse_term(rhs)?);
            let equal = equal_in_free(&l, &r, *variety)?;
            Ok(Outcome {
                code: if equal { 0 } else { 1 },
                text: if equal {
                    "equal".into()
                } else {
                    "not equal".into()
                },
                json: json!({
                    "variety": variety.name(),
                    "lhs": l.to_string(),
                    "rhs": r.to_string(),
                    "equal": equal,
                    "normal_forms": [normalize(&l, *variety)?.serialize(), normalize(&r, *variety)?.serialize()],
                }),
            })
        }
        OracleCmd::Normalize { variety, term } => {
            let t = variety.parse_term(term)?;
            let nf = normalize(&t, *variety)?;
            Ok(Outcome {
                code: 0,
                text: format!("{}\n{}", nf.serialize(), nf.to_term()),
                json: json!({
                    "variety": variety.name(),
                    "term": t.to_string(),
                    "normal_form": nf.serialize(),
                    "size": nf.size(),
                    "canonical_term": nf.to_term().to_string(),
                }),
            })
        }
        OracleCmd::Munn { term } => {
            let t = parse_term(term, Variety::InverseSemigroup.signature())?;
            let m = munn_tree(&t)?;
            let edges: Vec<String> = m
                .edges()
                .iter()
                .map(|(a, l, b)| format!("{a} -x{l}-> {b}"))
                .collect();
            Ok(Outcome {
                code: 0,
                text: format!(
                    "{}\nstart {}, end {}, {} vertices\n{}",
                    m.serialize(),
                    m.start(),
                    m.end(),
                    m.vertex_count(),
                    edges.join("\n")
                ),
                json: json!({
                    "term": t.to_string(),
                    "serialization": m.serialize(),
                    "start": m.start(),
                    "end": m.end(),
                    "vertices": m.vertex_count(),
                    "edges": m.edges(),
                    "idempotent": m.is_idempotent(),
                }),
            })
        }
    }
}

fn read(p: &Path) -> freecat::Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    })
}

fn load_assignment(v: Variety, p: &Path) -> freecat::Result<TermAssignment> {
    let raw: std::collections::BTreeMap<String, String> = serde_json::from_str(&read(p)?)
        .map_err(|e| Error::Invalid(format!("assignment JSON: {e}")))?;
    let mut entries = Vec::new();
    for (op, text) in raw {
        let arity = v
            .signature()
            .arity(&op)
            .ok_or_else(|| Error::UnknownOp(op.clone()))?;
        entries.push((op, arity, v.parse_term(&text)?));
    }
    TermAssignment::new(entries)
}

/// The family of `s`: loaded from a file, implied by the spec kind, or
/// tabulated from the spec on small elements.
fn family_for(
    phi: &AutomorphismSpec,
    path: Option<&Path>,
    ranks: &[u32],
    bound: usize,
    cap: u128,
) -> freecat::Result<BijectionFamily> {
    if let Some(p) = path {
        return BijectionFamily::load(phi.variety(), p);
    }
    match phi.kind() {
        SpecKind::Identity => Ok(BijectionFamily::Identity),
        SpecKind::Mirror => Ok(BijectionFamily::Reversal),
        SpecKind::Table => freecat::automorphism::extract_family(phi, ranks, bound, cap),
    }
}

fn category_verify(
    cli: &Cli,
    spec: &Path,
    family: Option<&Path>,
    ranks: &[u32],
    bound: usize,
    sampling: &SampleArgs,
) -> freecat::Result<Outcome> {
    let phi = AutomorphismSpec::load(spec)?;
    let v = phi.variety();
    let s = family_for(&phi, family, ranks, bound, cli.cap)?;
    let objects = ranks
        .iter()
        .map(|r| FreeObject::new(v, *r))
        .collect::<freecat::Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let pick = |rng: &mut ChaCha8Rng| objects[rand::Rng::gen_range(rng, 0..objects.len())];
    // image sizes cycle through 1..=sample_size so every size is represented
    let sample: Vec<Morphism> = (0..sampling.samples)
        .map(|i| {
            let (d, c) = (pick(&mut rng), pick(&mut rng));
            random_morphism(d, c, 1 + i % sampling.sample_size.max(1), &mut rng)
        })
        .collect();
    let pairs: Vec<(Morphism, Morphism)> = (0..sampling.samples)
        .map(|i| {
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let size = 1 + i % sampling.sample_size.max(1);
            let f = random_morphism(a, b, size, &mut rng);
            (random_morphism(b, c, size, &mut rng), f)
        })
        .collect();

    let mut report = CheckReport::new();
    report.extend(check_functor(&phi, &pairs)?);
    for obj in &objects {
        report.extend(check_generators(&phi, *obj)?);
        if phi.object(*obj) == *obj {
            let table = extract_s(&phi, *obj, bound, cli.cap)?;
            let mut bad = None;
            for (a, b) in &table.map {
                let expected = s.apply(*obj, a)?;
                if &expected != b {
                    bad = Some(format!("s({a}) = {b} but the family gives {expected}"));
                    break;
                }
            }
            report.record(
                format!(
                    "family agrees with s on {obj} ({} entries)",
                    table.map.len()
                ),
                Ok(bad),
            )?;
        }
    }
    let conj = verify_conjugation(&phi, &s, &sample, sampling.probe_size, cli.cap)?;
    let failed = conj
        .checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .count();
    let worst = conj
        .checks
        .iter()
        .find(|c| c.status == Status::Fail)
        .and_then(|c| c.counterexample.clone());
    let gaps = conj.checks.iter().any(|c| c.status == Status::Gap);
    if gaps && failed == 0 {
        report.push(
            format!("conjugation on {} sampled morphisms", sample.len()),
            Status::Gap,
            None,
        );
    } else {
        report.record(
            format!("conjugation on {} sampled morphisms", sample.len()),
            Ok(worst.map(|w| format!("{failed} failure(s); first: {w}"))),
        )?;
    }
    report.extend(s_family_laws(&[("Φ", phi.clone())], ranks, bound, cli.cap)?);
    let json = json!({
        "bounds": {
            "ranks": ranks,
            "bound": bound,
            "samples": sampling.samples,
            "sample_size": sampling.sample_size,
            "probe_size": sampling.probe_size,
            "seed": cli.seed,
            "cap": cli.cap.to_string(),
        },
        "family": s.to_json(),
    });
    Ok(Outcome::from_report(&report, json, String::new()))
}

fn indicator(side: Side, args: &IndicatorArgs) -> freecat::Result<Outcome> {
    let a0 = FiniteAlgebra::load(&args.a0)?;
    let universe = load_universe(&args.universe)?;
    let r: IndicatorResult = match side {
        Side::Right => is_right_indicator(&a0, &universe, args.max_carrier)?,
        Side::Left => is_left_indicator(&a0, &universe, args.max_carrier)?,
    };
    let label = match side {
        Side::Right => "right",
        Side::Left => "left",
    };
    let mut text = format!(
        "{label} indicator: {} ({} pairs, {} bijections)\n",
        r.holds, r.pairs_checked, r.bijections_checked
    );
    let mut recheck = None;
    if let Some(c) = &r.certificate {
        let find = |n: &str| {
            universe
                .iter()
                .find(|x| x.name == n)
                .expect("certificate names a universe member")
        };
        let check = check_certificate(side, &a0, find(&c.a), find(&c.b), &c.bijection);
        let _ = writeln!(
            text,
            "certificate: s = {:?} from {} to {}; {}; independent recheck refutes: {}",
            c.bijection,
            c.a,
            c.b,
            c.defect,
            check.refutes()
        );
        recheck = Some(check);
    }
    let mut json = serde_json::to_value(&r).expect("result serializes");
    json["a0"] = json!(a0.name);
    json["universe"] = json!(universe.iter().map(|a| a.name.clone()).collect::<Vec<_>>());
    json["certificate_recheck"] = serde_json::to_value(&recheck).expect("check serializes");
    json["bounds"] = json!({ "max_carrier": args.max_carrier });
    Ok(Outcome {
        code: if r.holds { 0 } else { 1 },
        text,
        json,
    })
}
