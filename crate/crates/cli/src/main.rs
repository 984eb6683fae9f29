mod config;
mod golden;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use shimura::arith::{format_rational, frac, parse_rational};
use shimura::cm::{cm_pair_scan, degree_law, hecke_elements, repulsion_experiment, submodule_count};
use shimura::genus::{
    catalog_cross_check, group_orders, nori_check, threshold_search, unit_generators, Catalog, GenusContext,
};
use shimura::group::{
    component_structure, congruence_traces, displacement_lower, elliptic_classes, unit_norm_minus_one,
};
use shimura::quat::{discriminant, hilbert_symbol, is_indefinite, ramified_places, LatticeOrder, Place, QuatAlgebra};
use shimura::volume::{
    default_zoo, harness_hecke_sets, point_centers, run_conj_harness, run_ht_harness, verify_conj_ratio,
    verify_diag, verify_hecke, verify_point_bound, HarnessConfig,
};

use config::RunConfig;
use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "shimura", version, about = "Quaternion, Shimura-curve and volume-bound computations")]
struct Cli {
    /// JSON run configuration; defaults fill anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// JSON lines output (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output of the result only.
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Omit wall-clock timing so output is byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ramification and Hilbert symbols.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Maximal orders and mod-p splittings.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Unit groups, congruence subgroups and torsion.
    #[command(subcommand)]
    Group(GroupCmd),
    /// CM pair scan at level p.
    Cm(CmArgs),
    /// Hecke element sets and degree counts.
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Repulsion experiment for close Heegner pairs.
    Repulsion(RepulsionArgs),
    /// Volume bounds on the curve zoo.
    #[command(subcommand)]
    Volume(VolumeCmd),
    /// Genus accounting and threshold scan.
    #[command(subcommand)]
    Audit(AuditCmd),
    /// Exact-arithmetic invariant suite.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
    /// Record or check frozen regression values.
    Golden {
        #[arg(value_enum)]
        mode: GoldenMode,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value = "golden")]
        dir: PathBuf,
    },
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Info(AlgebraArgs),
    Hilbert {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// A prime, or `inf`.
        #[arg(long)]
        place: String,
    },
}

#[derive(Subcommand, Debug)]
enum OrderCmd {
    Maximal(AlgebraArgs),
    Split {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Minimal trace over the level-p subgroup in the box.
    Traces {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        height: Option<i64>,
    },
    /// Conjugacy classes of torsion units.
    Classes {
        #[arg(long)]
        height: Option<i64>,
    },
    Components {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Args, Debug)]
struct CmArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    height: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum HeckeCmd {
    Elements {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        height: Option<i64>,
    },
    /// Brute-force count against the degree formula.
    Degree {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Args, Debug)]
struct RepulsionArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long)]
    height: Option<i64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BoundArg {
    Point,
    Diag,
    Hecke,
    Conj,
}

#[derive(Subcommand, Debug)]
enum VolumeCmd {
    Verify {
        #[arg(long)]
        curve: String,
        #[arg(long, value_enum)]
        bound: BoundArg,
        #[arg(long)]
        r: f64,
        #[arg(long = "R")]
        big_r: Option<f64>,
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// Starting quadrature mesh.
        #[arg(long)]
        mesh: Option<usize>,
    },
    /// Every zoo cell of every bound.
    Harness,
    Zoo,
}

#[derive(Subcommand, Debug)]
enum AuditCmd {
    Genus {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        p: u64,
    },
    /// Level genera over the configured primes for every catalog entry.
    Table,
    Threshold {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d: i64,
        /// JSON file of threshold constants.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    Nori {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        height: Option<i64>,
    },
    Catalog,
    Orders {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GoldenMode {
    Record,
    Check,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<shimura::Error> for Failure {
    fn from(e: shimura::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn algebra_of(cfg: &RunConfig, args: &AlgebraArgs) -> Result<Arc<QuatAlgebra>, Failure> {
    let a = match &args.alpha {
        Some(s) => parse_rational(s)?,
        None => frac(cfg.algebra.0, 1),
    };
    let b = match &args.beta {
        Some(s) => parse_rational(s)?,
        None => frac(cfg.algebra.1, 1),
    };
    Ok(QuatAlgebra::new(a, b)?)
}

fn default_order(cfg: &RunConfig) -> Result<Arc<LatticeOrder>, Failure> {
    let alg = QuatAlgebra::from_ints(cfg.algebra.0, cfg.algebra.1)?;
    Ok(Arc::new(LatticeOrder::maximal(&alg)?))
}

fn parse_place(s: &str) -> Result<Place, Failure> {
    if s == "inf" {
        return Ok(Place::Infinite);
    }
    let q = s.parse().map_err(|_| Failure::Usage(format!("bad place {s}")))?;
    Ok(Place::finite(q)?)
}

fn run(cli: &Cli, cfg: &RunConfig, em: &Emitter) -> Outcome {
    let h = |given: Option<i64>, name: &str| given.unwrap_or_else(|| cfg.height(name));
    match &cli.command {
        Command::Algebra(AlgebraCmd::Info(args)) => {
            let alg = algebra_of(cfg, args)?;
            let places: Vec<String> = ramified_places(&alg).iter().map(|p| p.to_string()).collect();
            em.emit(
                "algebra info",
                &json!({
                    "alpha": format_rational(alg.alpha()),
                    "beta": format_rational(alg.beta()),
                    "ramified_places": places,
                    "discriminant": discriminant(&alg),
                    "indefinite": is_indefinite(&alg),
                }),
            )?;
        }
        Command::Algebra(AlgebraCmd::Hilbert { a, b, place }) => {
            let v = parse_place(place)?;
            let s = hilbert_symbol(&parse_rational(a)?, &parse_rational(b)?, v)?;
            em.emit("algebra hilbert", &json!({"a": a, "b": b, "place": place, "symbol": s}))?;
        }
        Command::Order(OrderCmd::Maximal(args)) => {
            let o = LatticeOrder::maximal(&algebra_of(cfg, args)?)?;
            let basis: serde_json::Value = serde_json::from_str(&o.to_json()).map_err(|e| Failure::Domain(e.to_string()))?;
            em.emit(
                "order maximal",
                &json!({
                    "basis": basis,
                    "reduced_discriminant": o.reduced_discriminant().to_string(),
                    "is_maximal": o.is_maximal(),
                }),
            )?;
        }
        Command::Order(OrderCmd::Split { algebra, p }) => {
            let o = LatticeOrder::maximal(&algebra_of(cfg, algebra)?)?;
            let s = o.split_mod_p(*p)?;
            let images: Vec<[u64; 4]> = s.images().iter().map(|m| m.m).collect();
            em.emit("order split", &json!({"p": p, "images": images, "bijective": s.is_bijective()}))?;
        }
        Command::Group(GroupCmd::Traces { p, height }) => {
            let o = default_order(cfg)?;
            let rep = congruence_traces(&o, &o.split_mod_p(*p)?, h(*height, "congruence"));
            let displacement = match rep.min_abs_trace {
                Some((t, _)) => Some(displacement_lower(t as f64)?),
                None => None,
            };
            em.emit(
                "group traces",
                &json!({"report": rep, "displacement_lower": displacement, "two_ln_p": 2.0 * (*p as f64).ln()}),
            )?;
        }
        Command::Group(GroupCmd::Classes { height }) => {
            let o = default_order(cfg)?;
            let height = h(*height, "classes");
            let classes: Vec<_> = elliptic_classes(&o, height)
                .into_iter()
                .map(|(k, members)| json!({"kind": k, "representative": members[0], "size": members.len()}))
                .collect();
            em.emit("group classes", &json!({"height": height, "classes": classes, "lower_bound_certificate": true}))?;
        }
        Command::Group(GroupCmd::Components { p }) => {
            let o = default_order(cfg)?;
            let height = cfg.height("units");
            em.emit(
                "group components",
                &json!({
                    "structure": component_structure(&o, *p, height),
                    "norm_minus_one": unit_norm_minus_one(&o, height),
                }),
            )?;
        }
        Command::Cm(args) => {
            let o = default_order(cfg)?;
            let scan = cm_pair_scan(&o, args.p, h(args.height, "cm"))?;
            let records: Vec<_> = scan.iter().map(|c| c.record()).collect();
            em.emit("cm", &records)?;
        }
        Command::Hecke(HeckeCmd::Elements { m, height }) => {
            let set = hecke_elements(&default_order(cfg)?, *m, h(*height, "hecke"))?;
            em.emit(
                "hecke elements",
                &json!({"set": set, "found": set.elements.len(), "height_limited": set.height_limited()}),
            )?;
        }
        Command::Hecke(HeckeCmd::Degree { n }) => {
            let o = default_order(cfg)?;
            let disc: u64 = o.reduced_discriminant().try_into().unwrap_or(0);
            let count = submodule_count(*n, disc)?;
            let law = degree_law(*n);
            em.emit("hecke degree", &json!({"n": n, "brute_force": count, "formula": law, "tolerance": "exact"}))?;
            return Ok(count == law);
        }
        Command::Repulsion(args) => {
            let rep = repulsion_experiment(&default_order(cfg)?, args.p, args.r, h(args.height, "repulsion"))?;
            em.emit("repulsion", &rep)?;
        }
        Command::Volume(VolumeCmd::Verify { curve, bound, r, big_r, m, mesh }) => {
            let zoo = default_zoo()?;
            let c = zoo
                .iter()
                .find(|c| &c.tag == curve)
                .ok_or_else(|| Failure::Usage(format!("no zoo curve {curve}")))?;
            let mut q = cfg.quadrature;
            if let Some(n) = mesh {
                q.start = *n;
            }
            let mut reports = Vec::new();
            for norm in cfg.normalizations() {
                let rep = match bound {
                    BoundArg::Point => {
                        let center = point_centers(c)
                            .into_iter()
                            .next()
                            .ok_or_else(|| Failure::Domain("no center on the curve".into()))?;
                        verify_point_bound(c, &center, *r, 1, norm, &q)?
                    }
                    BoundArg::Diag => verify_diag(c, *r, norm, &q)?,
                    BoundArg::Hecke => {
                        let set = hecke_elements(&default_order(cfg)?, *m, cfg.height("hecke"))?;
                        verify_hecke(c, &set, *r, norm, &q)?
                    }
                    BoundArg::Conj => {
                        let big_r = big_r.ok_or_else(|| Failure::Usage("--R is required for conj".into()))?;
                        verify_conj_ratio(c, *r, big_r, norm, &q)?
                    }
                };
                reports.push(rep);
            }
            em.emit("volume verify", &reports)?;
        }
        Command::Volume(VolumeCmd::Harness) => {
            let hc = HarnessConfig {
                quadrature: cfg.quadrature,
                ..HarnessConfig::default()
            };
            let zoo = default_zoo()?;
            let sets = harness_hecke_sets(&default_order(cfg)?, &hc.hecke_m, cfg.height("hecke"))?;
            let ht = run_ht_harness(&zoo, &sets, &hc, &cfg.normalizations())?;
            let conj = run_conj_harness(&zoo, "graph_conj", &hc, 0.02)?;
            let ok = !ht.consistent_with.is_empty() && conj.all_hold;
            em.emit("volume harness", &json!({"config": hc, "hwang_to": ht, "conjugate_ratio": conj}))?;
            return Ok(ok);
        }
        Command::Volume(VolumeCmd::Zoo) => {
            em.emit("volume zoo", &default_zoo()?)?;
        }
        Command::Audit(AuditCmd::Genus { d, p }) => {
            em.emit("audit genus", &GenusContext::from_catalog(*d)?.level_genus(*p)?)?;
        }
        Command::Audit(AuditCmd::Table) => {
            let mut rows = Vec::new();
            for rec in Catalog::bundled()?.records() {
                let ctx = GenusContext::new(rec)?;
                for &p in &cfg.primes {
                    if rec.discriminant % p as i64 == 0 {
                        rows.push(json!({"d": rec.discriminant, "p": p, "skipped": "p divides d"}));
                        continue;
                    }
                    let g = ctx.level_genus(p)?;
                    rows.push(json!({
                        "d": rec.discriminant,
                        "p": p,
                        "components": g.components,
                        "genus_per_component": g.genus_per_component,
                        "genus_over_p3": g.genus_per_component as f64 / (p as f64).powi(3),
                    }));
                }
            }
            em.emit("audit table", &rows)?;
        }
        Command::Audit(AuditCmd::Threshold { k, d, constants }) => {
            let c = match constants {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => cfg.constants.clone(),
            };
            em.emit("audit threshold", &threshold_search(*k, *d, &c)?)?;
        }
        Command::Audit(AuditCmd::Nori { p, height }) => {
            let o = default_order(cfg)?;
            let gens = unit_generators(&o, h(*height, "nori"))?;
            let rep = nori_check(&gens, &o.split_mod_p(*p)?)?;
            em.emit("audit nori", &rep)?;
            return Ok(rep.surjective);
        }
        Command::Audit(AuditCmd::Catalog) => {
            let cat = Catalog::bundled()?;
            let checks = cat.records().map(catalog_cross_check).collect::<shimura::Result<Vec<_>>>()?;
            let ok = checks.iter().all(|c| c.agrees);
            em.emit("audit catalog", &json!({"records": cat, "cross_checks": checks}))?;
            return Ok(ok);
        }
        Command::Audit(AuditCmd::Orders { p }) => {
            em.emit("audit orders", &group_orders(*p)?)?;
        }
        Command::Selftest { quick } => {
            let rep = selftest::run(cfg.seed, *quick)?;
            em.emit("selftest", &rep)?;
            return Ok(rep.pass);
        }
        Command::Golden { mode, suite, dir } => {
            let values = golden::compute(suite, cfg)?;
            let rep = match mode {
                GoldenMode::Record => golden::record(dir, &values)?,
                GoldenMode::Check => golden::check(dir, &values),
            };
            em.emit("golden", &rep)?;
            return Ok(rep.pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let em = Emitter {
        format: if cli.csv { Format::Csv } else { Format::Json },
        timing: !cli.no_timing,
        config: &cfg,
        started,
    };
    match run(&cli, &cfg, &em) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use shimura::hyper::Normalization;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn normalization_tags_parse() {
        let n: Normalization = serde_json::from_str("\"curvature-4\"").unwrap();
        assert_eq!(n, Normalization::CurvatureMinus4);
    }
}
