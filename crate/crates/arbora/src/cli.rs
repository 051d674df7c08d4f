//! Command-line front end. Every command reads tree files and prints one JSON
//! document (or DOT) on stdout.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::blocks;
use crate::complex;
use crate::corpus;
use crate::error::{check_bound, Error, Result};
use crate::fan;
use crate::flip_order::{self, CongruenceReport, FiberDefect, OrderTable};
use crate::geometry::{self, Certificate};
use crate::minkowski;
use crate::spine::{self, Spine};
use crate::tree::SignedTree;
use crate::vset::VSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "arbora", version, about = "Signed tree associahedra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct TreeArg {
    /// Tree file (JSON with `vertices` and `edges`).
    pub tree: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relevant building blocks.
    Blocks(TreeArg),
    /// Face numbers and incidence profile of the nested complex.
    Complex {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
    /// Vertex and facet description with its realization certificate.
    Polytope {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
    /// Spine swept by a linear order.
    Kappa {
        #[command(flatten)]
        input: TreeArg,
        /// Comma-separated vertex ids.
        #[arg(long)]
        order: String,
    },
    /// Increasing flip graph for a base order (default: id order).
    Flipgraph {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
    /// Tight right-hand sides and Minkowski coefficients.
    Minkowski {
        #[command(flatten)]
        input: TreeArg,
        /// Also compare against vertex points and check supermodularity.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 7)]
        max_nu: usize,
    },
    /// Directed-path spines and common vertices.
    Singletons {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
    Barycenter {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
    /// Whether two trees give isometric polytopes.
    Isometric { a: PathBuf, b: PathBuf },
    /// Interval and projection checks of the spine fibers in the weak order.
    CongruenceCheck {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, conflicts_with = "all_orders", required_unless_present = "all_orders")]
        order: Option<String>,
        #[arg(long)]
        all_orders: bool,
        #[arg(long, default_value_t = 8)]
        max_nu: usize,
    },
    /// Face numbers across all signatures of an underlying tree.
    SignatureSweep {
        #[command(flatten)]
        input: TreeArg,
        #[arg(long, default_value_t = 10)]
        max_nu: usize,
    },
}

/// Outcome of a command: the document and whether a check failed.
pub struct Output {
    pub document: String,
    pub verified: bool,
}

fn load(path: &Path) -> Result<SignedTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    SignedTree::from_json(&text)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::VerificationFailure(_) | Error::RecursionMismatch { .. } | Error::InversionMismatch { .. } => {
            EXIT_VERIFICATION
        }
        _ => EXIT_INPUT,
    }
}

/// Parse arguments, run, print; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e);
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e);
            return EXIT_OK;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let _ = writeln!(out, "{}", o.document);
            if o.verified {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            exit_code(&e)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn ok(v: Value) -> Result<Output> {
    Ok(Output {
        document: pretty(&v),
        verified: true,
    })
}

fn ratio(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn spine_json(tree: &SignedTree, s: &Spine) -> Value {
    serde_json::to_value(spine::to_file(tree, s)).expect("spine serializes")
}

fn order_ids(tree: &SignedTree, order: &[usize]) -> String {
    order.iter().map(|&v| tree.id(v).as_str()).collect::<Vec<_>>().join(",")
}

pub fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Blocks(input) => {
            let t = load(&input.tree)?;
            let bs = blocks::BuildingSet::new(&t);
            ok(json!(bs.blocks.iter().map(|&b| t.labels(b)).collect::<Vec<_>>()))
        }
        Command::Complex { input, max_nu } => {
            let t = load(&input.tree)?;
            check_bound("facet enumeration", t.nu(), *max_nu)?;
            let stats = complex::complex_stats(&t);
            let pseudo = complex::is_pseudomanifold(&t);
            let facets: Vec<Vec<Vec<String>>> = complex::enumerate_nested_sets(&t, true)
                .iter()
                .map(|f| f.iter().map(|&b| t.labels(b)).collect())
                .collect();
            ok(json!({
                "nu": t.nu(),
                "f_vector": stats.f_complex,
                "facets": facets,
                "euler_characteristic": complex::euler_characteristic(&stats.f_complex),
                "incidence_profile": stats.incidence_profile,
                "pseudomanifold": pseudo.is_ok(),
            }))
        }
        Command::Polytope { input, max_nu } => {
            let t = load(&input.tree)?;
            let p = geometry::realize_polytope(&t, *max_nu)?;
            let verified = p.certificate.is_pass();
            let witness = match &p.certificate {
                Certificate::Pass => Value::Null,
                Certificate::Fail(w) => json!(w),
            };
            let ids: Vec<&str> = t.standard().iter().map(|v| t.id(v).as_str()).collect();
            let doc = json!({
                "coordinates": ids,
                "certificate": p.certificate.label(),
                "witness": witness,
                "vertex_count": p.vertices.len(),
                "facet_count": p.facets.len(),
                "vertices": p.vertices.iter().map(|(s, x)| json!({
                    "spine": spine_json(&t, s),
                    "coords": x.standard_coords(&t),
                })).collect::<Vec<_>>(),
                "facets": p.facets.iter().map(|(_, h)| json!({
                    "block": t.labels(h.support),
                    "rhs": h.rhs,
                })).collect::<Vec<_>>(),
            });
            Ok(Output {
                document: pretty(&doc),
                verified,
            })
        }
        Command::Kappa { input, order } => {
            let t = load(&input.tree)?;
            let o = fan::parse_order(&t, order)?;
            let s = fan::kappa(&t, &o)?;
            ok(spine_json(&t, &s))
        }
        Command::Flipgraph {
            input,
            base,
            dot,
            max_nu,
        } => {
            let t = load(&input.tree)?;
            check_bound("flip graph", t.nu(), *max_nu)?;
            let b = match base {
                Some(text) => fan::parse_order(&t, text)?,
                None => t.standard_list(),
            };
            let g = flip_order::increasing_flip_digraph(&t, &b)?;
            if *dot {
                return Ok(Output {
                    document: flip_order::flipgraph_dot(&t, &g),
                    verified: true,
                });
            }
            ok(json!({
                "base": order_ids(&t, &b),
                "spines": g.spines.iter().map(|s| spine_json(&t, s)).collect::<Vec<_>>(),
                "arcs": g.arcs,
                "source": g.source,
                "sink": g.sink,
            }))
        }
        Command::Minkowski { input, check, max_nu } => {
            let t = load(&input.tree)?;
            let table = minkowski::minkowski_coefficients(&t, *max_nu)?;
            if *check {
                let oracle = minkowski::moebius_oracle(&t, *max_nu)?;
                for (u, y) in oracle {
                    if table.y_of(u) != Some(y) {
                        return Err(Error::InversionMismatch {
                            subset: t.key(u),
                            closed: table.y_of(u).unwrap_or(0),
                            oracle: y,
                        });
                    }
                }
                if let Some((a, b)) = minkowski::supermodularity_witness(&table) {
                    return Err(Error::VerificationFailure(format!(
                        "z is not supermodular at {{{}}}, {{{}}}",
                        t.key(a),
                        t.key(b)
                    )));
                }
                let points: Vec<_> = spine::enumerate_maximal_spines(&t)
                    .iter()
                    .map(|s| geometry::vertex_point(&t, s))
                    .collect::<Result<_>>()?;
                for (i, &u) in table.subsets.iter().enumerate() {
                    let min = points.iter().map(|p| p.sum_over(u)).min().unwrap_or(0);
                    if min != table.z[i] {
                        return Err(Error::VerificationFailure(format!(
                            "z of {{{}}} is {} but the minimum over vertices is {}",
                            t.key(u),
                            table.z[i],
                            min
                        )));
                    }
                }
            }
            let mut y = serde_json::Map::new();
            let mut z = serde_json::Map::new();
            for (i, &u) in table.subsets.iter().enumerate() {
                y.insert(t.key(u), json!(table.y[i]));
                z.insert(t.key(u), json!(table.z[i]));
            }
            ok(json!({ "y": y, "z": z, "check": "PASS" }))
        }
        Command::Singletons { input, max_nu } => {
            let t = load(&input.tree)?;
            check_bound("singleton enumeration", t.nu(), *max_nu)?;
            let singles = geometry::singleton_spines(&t);
            let recursive = geometry::singleton_count_recursive(&t)?;
            let mut doc = json!({
                "count": singles.len(),
                "recursive": recursive,
                "orders": singles.iter().map(|(_, o)| order_ids(&t, o)).collect::<Vec<_>>(),
            });
            if !t.has_phantoms() {
                doc["common_with_parallelotope"] = json!(geometry::common_vertices_para(&t)?.len());
                doc["common_with_both"] = json!(geometry::common_vertices_all(&t)?.len());
            }
            ok(doc)
        }
        Command::Barycenter { input, max_nu } => {
            let t = load(&input.tree)?;
            check_bound("barycenter", t.nu(), *max_nu)?;
            let b = geometry::barycenter(&t)?;
            let mut m = serde_json::Map::new();
            for (v, x) in t.standard().iter().zip(b) {
                m.insert(t.id(v).to_string(), json!(ratio(x)));
            }
            ok(json!({ "barycenter": m }))
        }
        Command::Isometric { a, b } => {
            let ta = load(a)?;
            let tb = load(b)?;
            ok(json!({ "isometric": geometry::isometric(&ta, &tb) }))
        }
        Command::CongruenceCheck {
            input,
            order,
            all_orders,
            max_nu,
        } => {
            let t = load(&input.tree)?;
            let table = OrderTable::new(&t, *max_nu)?;
            let reports = if *all_orders {
                use rayon::prelude::*;
                table
                    .orders
                    .par_iter()
                    .map(|b| flip_order::diagnose(&t, &table, b))
                    .collect()
            } else {
                let base = fan::parse_order(&t, order.as_deref().unwrap_or_default())?;
                vec![flip_order::diagnose(&t, &table, &base)]
            };
            let congruences = reports.iter().filter(|r| r.is_congruence()).count();
            let intervals = reports.iter().filter(|r| r.fibers_are_intervals()).count();
            ok(json!({
                "bases": reports.len(),
                "congruences": congruences,
                "interval_bases": intervals,
                "reports": reports.iter().map(|r| report_json(&t, r)).collect::<Vec<_>>(),
            }))
        }
        Command::SignatureSweep { input, max_nu } => {
            let t = load(&input.tree)?;
            ok(signature_sweep(&t, *max_nu)?)
        }
    }
}

fn report_json(t: &SignedTree, r: &CongruenceReport) -> Value {
    let fiber = r.fiber_witness.as_ref().map(|w| {
        let defect = match &w.defect {
            FiberDefect::NoUniqueMinimum => json!("no unique minimum"),
            FiberDefect::NoUniqueMaximum => json!("no unique maximum"),
            FiberDefect::Gap { order } => json!({ "outside_order": order_ids(t, order) }),
        };
        json!({ "spine": spine_json(t, &w.spine), "defect": defect })
    });
    let proj = |w: &Option<flip_order::ProjectionWitness>| {
        w.as_ref()
            .map(|w| json!({ "lower": order_ids(t, &w.lower), "upper": order_ids(t, &w.upper) }))
    };
    json!({
        "base": order_ids(t, &r.base),
        "congruence": r.is_congruence(),
        "fibers_are_intervals": r.fibers_are_intervals(),
        "fiber_witness": fiber,
        "down_projection_witness": proj(&r.down_witness),
        "up_projection_witness": proj(&r.up_witness),
    })
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Signatures of the same underlying tree, grouped by the leg operations
/// (global flip, leaf flips, swapping opposite signs along degree-2 chains)
/// and by tree automorphisms. Negative sets are bitmasks over the vertices.
pub fn signature_classes(base: &SignedTree) -> Result<Vec<VSet>> {
    if base.has_phantoms() {
        return Err(Error::PreconditionViolated("signature sweep needs a tree without phantoms".into()));
    }
    let n = base.n();
    let full = base.standard();
    let size = 1usize << n;
    let mut parent: Vec<usize> = (0..size).collect();
    let leaves: Vec<usize> = (0..n).filter(|&v| base.degree(v) == 1).collect();
    let swaps: Vec<(usize, usize)> = base
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| base.degree(a) <= 2 && base.degree(b) <= 2)
        .collect();
    let mut by_shape: BTreeMap<String, usize> = BTreeMap::new();
    for m in 0..size {
        let neg = VSet(m as u64);
        union(&mut parent, m, neg.0 as usize ^ full.0 as usize);
        for &v in &leaves {
            union(&mut parent, m, m ^ (1 << v));
        }
        for &(a, b) in &swaps {
            if neg.contains(a) != neg.contains(b) {
                union(&mut parent, m, m ^ (1 << a) ^ (1 << b));
            }
        }
        let labels: Vec<char> = (0..n).map(|v| if neg.contains(v) { '-' } else { '+' }).collect();
        let key = corpus::labeled_canonical_form(n, base.edges(), &labels);
        match by_shape.get(&key) {
            Some(&other) => union(&mut parent, m, other),
            None => {
                by_shape.insert(key, m);
            }
        }
    }
    let mut largest: BTreeMap<usize, usize> = BTreeMap::new();
    for m in 0..size {
        let r = find(&mut parent, m);
        largest.insert(r, m);
    }
    let mut reps: Vec<usize> = largest.into_values().collect();
    reps.sort_unstable_by(|a, b| b.cmp(a));
    Ok(reps.into_iter().map(|m| VSet(m as u64)).collect())
}

pub fn signature_sweep(base: &SignedTree, max_nu: usize) -> Result<Value> {
    check_bound("signature sweep", base.nu(), max_nu)?;
    let classes = signature_classes(base)?;
    type Row = (SignedTree, complex::ComplexStats, Vec<u64>);
    let rows: Vec<Row> = classes
        .iter()
        .map(|&neg| {
            let t = base.with_signs(neg);
            let stats = complex::complex_stats(&t);
            let h = flip_order::h_vector(&t, &t.standard_list())?;
            Ok((t, stats, h))
        })
        .collect::<Result<_>>()?;
    let all_equal = |f: &dyn Fn(&Row) -> Value| {
        rows.windows(2).all(|w| f(&w[0]) == f(&w[1]))
    };
    let f_equal = all_equal(&|r| json!(r.1.f_complex));
    let h_equal = all_equal(&|r| json!(r.2));
    let profiles_equal = all_equal(&|r| json!(r.1.incidence_profile));
    Ok(json!({
        "classes": rows.iter().map(|(t, s, h)| {
            let signs: String = t.standard().iter().map(|v| t.sign(v).symbol()).collect();
            json!({
                "signature": signs,
                "f_vector": s.f_complex,
                "h": h,
                "incidence_profile": s.incidence_profile,
            })
        }).collect::<Vec<_>>(),
        "class_count": rows.len(),
        "f_vectors_equal": f_equal,
        "h_vectors_equal": h_equal,
        "incidence_profiles_equal": profiles_equal,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tree(dir: &Path, name: &str, t: &SignedTree) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, t.to_json()).unwrap();
        p
    }

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("arbora").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("arbora-cli-{}-{}", tag, std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn signature_classes_examples() {
        assert_eq!(signature_classes(&corpus::path_neg(5)).unwrap().len(), 1);
        assert_eq!(signature_classes(&corpus::path_neg(1)).unwrap().len(), 1);
        assert_eq!(signature_classes(&corpus::htree_eq()).unwrap().len(), 2);
        assert_eq!(signature_classes(&corpus::tripod_neg()).unwrap().len(), 1);
    }

    #[test]
    fn polytope_and_minkowski_commands() {
        let d = tmpdir("poly");
        let neg = write_tree(&d, "tripod_neg.json", &corpus::tripod_neg());
        let pos = write_tree(&d, "tripod_pos.json", &corpus::tripod_pos());
        let (code, out, _) = call(&["polytope", neg.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["certificate"].as_str(), v["vertex_count"].as_u64(), v["facet_count"].as_u64()), (Some("PASS"), Some(16), Some(10)));

        let (code, out, _) = call(&["minkowski", pos.to_str().unwrap(), "--check"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["y"]["2"], json!(-2));
        assert_eq!(v["y"]["1,2"], json!(3));
        assert_eq!(v["check"], json!("PASS"));

        let (_, again, _) = call(&["minkowski", pos.to_str().unwrap(), "--check"]);
        assert_eq!(out, again);
    }

    #[test]
    fn input_errors_exit_one() {
        let d = tmpdir("bad");
        let bad = d.join("bad.json");
        std::fs::write(&bad, r#"{"vertices":[{"id":"1"},{"id":"2"}],"edges":[["1","3"]]}"#).unwrap();
        assert_eq!(call(&["blocks", bad.to_str().unwrap()]).0, 1);
        assert_eq!(call(&["blocks", d.join("missing.json").to_str().unwrap()]).0, 1);
        assert_eq!(call(&["nonsense"]).0, 1);
        let t = write_tree(&d, "t.json", &corpus::tripod_neg());
        assert_eq!(call(&["kappa", t.to_str().unwrap(), "--order", "1,2,3"]).0, 1);
        assert_eq!(call(&["congruence-check", t.to_str().unwrap()]).0, 1);
    }
}
