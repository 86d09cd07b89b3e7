//! Command-line front end. Every command produces one JSON report; the table
//! format is a rendering of that report.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chain_modules::{
    all_generators, check_identities_on_basis, free_linear, lattice_subcomplex, quotient_complex,
    ChainModel, ComplexRep, LinearSystem, MapSystem, SubcomplexKind,
};
use crate::error::{Error, Result};
use crate::exact_linalg::{solve_exact, HomologyGroup, Ring};
use crate::generators::{
    counterexample_x, counterexample_y, n1_graph, or_a, sym_a, witness_cycle_a, FacetComplex,
    SimpleGraph, YKind, DEFAULT_CELL_CAP,
};
use crate::projections::{
    check_kernel, image_complex, operator_laws, Group, LawReport, Op, Operators,
};
use crate::s_functor::{
    check_complex_shift, check_moore_shift, check_poscon_acyclic, check_s_identities, SSigns,
};
use crate::structure_maps::{identity_suite, Mode};
use crate::symmetries::DEFAULT_GROUP_CAP;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "symhom",
    version,
    about = "Exact homology of simplicial and cubical sets with symmetries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct Common {
    /// JSON file with "facets" (simplicial complex) or "edges" (graph), or
    /// builtin:{x,y_t,y_r,y_rt}
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = RingArg::Q)]
    pub ring: RingArg,
    /// highest degree in which homology is reported
    #[arg(long, global = true, default_value_t = 3)]
    pub max_dim: i32,
    #[arg(long, global = true, value_enum, default_value_t = Reduce::None)]
    pub reduce: Reduce,
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_CELL_CAP)]
    pub cap_cells: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CAP)]
    pub cap_group: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Homology of the input, optionally after dividing out a sub-complex
    Homology,
    /// Run one of the verification suites
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Integer homology of the symmetry sub-complexes of the counterexamples
    Counterexample {
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Dimensions and timings of the reduced and unreduced pipelines
    Bench,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RingArg {
    Q,
    Z,
}

impl From<RingArg> for Ring {
    fn from(r: RingArg) -> Ring {
        match r {
            RingArg::Q => Ring::Q,
            RingArg::Z => Ring::Z,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reduce {
    #[value(name = "none")]
    #[serde(rename = "none")]
    None,
    #[value(name = "deg")]
    #[serde(rename = "deg")]
    Deg,
    #[value(name = "sym")]
    #[serde(rename = "sym")]
    Sym,
    #[value(name = "deg+sym")]
    #[serde(rename = "deg+sym")]
    DegSym,
    #[value(name = "con")]
    #[serde(rename = "con")]
    Con,
    #[value(name = "poscon")]
    #[serde(rename = "poscon")]
    PosCon,
    #[value(name = "t")]
    #[serde(rename = "t")]
    T,
    #[value(name = "r")]
    #[serde(rename = "r")]
    R,
    #[value(name = "rt")]
    #[serde(rename = "rt")]
    Rt,
}

impl Reduce {
    fn kind(&self) -> Option<SubcomplexKind> {
        Some(match self {
            Reduce::None => return None,
            Reduce::Deg => SubcomplexKind::Deg,
            Reduce::Sym => SubcomplexKind::SDeg,
            Reduce::DegSym => SubcomplexKind::DegPlusSDeg,
            Reduce::Con => SubcomplexKind::Con,
            Reduce::PosCon => SubcomplexKind::PosCon,
            Reduce::T => SubcomplexKind::TCon,
            Reduce::R => SubcomplexKind::RCon,
            Reduce::Rt => SubcomplexKind::RtCon,
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Homotopy,
    Functor,
    Splitting,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Simplicial,
    T,
    R,
    Rt,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

/// A finished report and whether everything it checked held.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

/// Builds the system named by `--input` up to degree `max_deg`.
pub fn load_system(input: Option<&str>, max_deg: i32, cap: usize) -> Result<(MapSystem, String)> {
    let input = input.ok_or_else(|| Error::invalid("--input is required for this command"))?;
    if let Some(name) = input.strip_prefix("builtin:") {
        let sys = match name {
            "x" => counterexample_x(max_deg)?,
            "y_t" => counterexample_y(YKind::T, max_deg)?,
            "y_r" => counterexample_y(YKind::R, max_deg)?,
            "y_rt" => counterexample_y(YKind::Rt, max_deg)?,
            _ => return Err(Error::invalid(format!("unknown builtin system {name:?}"))),
        };
        return Ok((sys, name.to_string()));
    }
    let text =
        std::fs::read_to_string(input).map_err(|e| Error::invalid(format!("{input}: {e}")))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| {
        Error::invalid(format!(
            "{input}: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let ctx = |e: Error| match e {
        Error::InvalidInput(m) => Error::invalid(format!("{input}: {m}")),
        other => other,
    };
    if doc.get("edges").is_some() {
        let g = SimpleGraph::from_json(&text).map_err(ctx)?;
        return Ok((n1_graph(&g, max_deg, cap)?, "n1".into()));
    }
    let k = FacetComplex::from_json(&text).map_err(ctx)?;
    match doc.get("system").and_then(Value::as_str).unwrap_or("sym_a") {
        "sym_a" => Ok((sym_a(&k, max_deg, cap)?, "sym_a".into())),
        "or_a" => {
            let order: Vec<usize> = (0..k.vertices.len()).collect();
            Ok((or_a(&k, &order, max_deg, cap)?, "or_a".into()))
        }
        other => Err(Error::invalid(format!(
            "{input}: field \"system\": unknown value {other:?}"
        ))),
    }
}

fn group_json(h: &HomologyGroup) -> (usize, Vec<String>) {
    (h.betti, h.torsion.iter().map(|t| t.to_string()).collect())
}

fn header(cli: &Cli) -> Value {
    json!({
        "tool": "symhom",
        "version": crate::VERSION,
        "command": cli.command,
        "config": cli.common,
    })
}

fn with_header(cli: &Cli, body: Value) -> Value {
    let mut h = header(cli);
    if let (Value::Object(a), Value::Object(b)) = (&mut h, body) {
        a.extend(b);
    }
    h
}

fn laws_json(rs: &[LawReport]) -> Value {
    json!(rs)
}

fn reduced(
    c: &ComplexRep,
    m: &ChainModel,
    kind: Option<SubcomplexKind>,
) -> Result<Option<ComplexRep>> {
    let Some(kind) = kind else { return Ok(None) };
    kind.check(m.mode(), m.flags())?;
    Ok(Some(quotient_complex(c, &all_generators(kind, m)?)?))
}

fn check_reduction(cli: &Cli) -> Result<()> {
    if cli.common.ring == RingArg::Z && cli.common.reduce != Reduce::None {
        return Err(Error::invalid(
            "quotient reductions only preserve homology over Q; over Z use `counterexample` for lattice sub-complexes",
        ));
    }
    if cli.common.max_dim < 0 {
        return Err(Error::invalid("--max-dim must be nonnegative"));
    }
    Ok(())
}

fn cmd_homology(cli: &Cli) -> Result<Outcome> {
    check_reduction(cli)?;
    let c = &cli.common;
    let (sys, kind) = load_system(c.input.as_deref(), c.max_dim + 1, c.cap_cells)?;
    let lin = free_linear(&sys);
    let m = ChainModel::new(&lin);
    let full = m.complex(c.ring.into())?;
    let red = reduced(&full, &m, c.reduce.kind())?;
    let target = red.as_ref().unwrap_or(&full);
    let hom = target.homology()?;
    let degrees: Vec<Value> = hom
        .iter()
        .map(|(n, h)| {
            let (betti, torsion) = group_json(h);
            json!({"n": n, "dim_full": full.dim(*n), "dim_reduced": target.dim(*n), "betti": betti, "torsion": torsion})
        })
        .collect();
    Ok(Outcome {
        report: with_header(
            cli,
            json!({"system": {"kind": kind, "mode": m.mode()}, "degrees": degrees}),
        ),
        pass: true,
    })
}

fn cmd_verify(cli: &Cli, suite: Suite) -> Result<Outcome> {
    let c = &cli.common;
    let ring: Ring = c.ring.into();
    match suite {
        Suite::Identities => {
            let simp = identity_suite(Mode::Simplicial, c.max_dim.clamp(0, 8))?;
            let cube = identity_suite(Mode::Cubical, c.max_dim.clamp(0, 6))?;
            let failures: Vec<_> = simp
                .iter()
                .chain(&cube)
                .filter(|r| !r.pass)
                .cloned()
                .collect();
            let mut body = json!({
                "simplicial_instances": simp.len(),
                "cubical_instances": cube.len(),
                "failures": failures,
            });
            let mut pass = failures.is_empty();
            if c.input.is_some() {
                let (sys, _) = load_system(c.input.as_deref(), c.max_dim, c.cap_cells)?;
                let rep = check_identities_on_basis(&free_linear(&sys), None);
                pass &= rep.passed();
                body["system"] = json!(rep);
            }
            Ok(Outcome {
                report: with_header(cli, body),
                pass,
            })
        }
        Suite::Homotopy => {
            if ring != Ring::Q {
                return Err(Error::invalid("the homotopy suite runs over Q"));
            }
            let (sys, _) = load_system(c.input.as_deref(), c.max_dim, c.cap_cells)?;
            let lin = free_linear(&sys);
            let m = ChainModel::new(&lin);
            let ops = Operators::with_cap(&m, Ring::Q, c.cap_group)?;
            let laws = operator_laws(&ops)?;
            let pass = laws.iter().all(|l| l.pass);
            Ok(Outcome {
                report: with_header(cli, json!({"laws": laws_json(&laws)})),
                pass,
            })
        }
        Suite::Functor => {
            let (sys, _) = load_system(c.input.as_deref(), c.max_dim, c.cap_cells)?;
            let lin = free_linear(&sys);
            if lin.mode() != Mode::Cubical {
                return Err(Error::invalid(
                    "the functor suite needs a cubical input (a graph)",
                ));
            }
            let standard = check_s_identities(&lin, SSigns::Standard)?;
            let negated = check_s_identities(&lin, SSigns::NegatedBoth)?;
            let shift = check_complex_shift(&lin, ring)?;
            let moore = check_moore_shift(&lin, ring)?;
            let poscon = check_poscon_acyclic(&lin, ring)?;
            let pass =
                standard.passed() && negated.passed() && shift.pass && moore.pass && poscon.pass;
            Ok(Outcome {
                report: with_header(
                    cli,
                    json!({
                        "relations": standard,
                        "relations_negated_signs": negated,
                        "complex_shift": shift,
                        "moore_shift": moore,
                        "poscon": poscon,
                    }),
                ),
                pass,
            })
        }
        Suite::Splitting => {
            if ring != Ring::Q {
                return Err(Error::invalid("the splitting suite runs over Q"));
            }
            let (sys, _) = load_system(c.input.as_deref(), c.max_dim, c.cap_cells)?;
            let lin = free_linear(&sys);
            let m = ChainModel::new(&lin);
            let ops = Operators::with_cap(&m, Ring::Q, c.cap_group)?;
            let (op, kind): (Op, SubcomplexKind) = match m.mode() {
                Mode::Simplicial => (Op::PX, SubcomplexKind::SDeg),
                Mode::Cubical if m.flags().reversals && m.flags().transpositions => {
                    (Op::U, SubcomplexKind::RtCon)
                }
                Mode::Cubical if m.flags().reversals => (Op::QX, SubcomplexKind::RCon),
                Mode::Cubical => (Op::PT, SubcomplexKind::TCon),
            };
            kind.check(m.mode(), m.flags())?;
            let mut laws = Vec::new();
            for n in m.lo().max(1)..=m.hi() {
                let g = match op {
                    Op::PX => Group::Sym(n),
                    Op::U => Group::Hyperoct,
                    Op::QX => Group::Rev(n),
                    _ => Group::CubePerm,
                };
                laws.push(check_kernel(
                    &ops,
                    g,
                    n,
                    &crate::chain_modules::subcomplex_generators(kind, &m, n)?,
                )?);
            }
            let img = image_complex(&ops, op)?;
            let full = m.complex(Ring::Q)?;
            let quot = quotient_complex(&full, &all_generators(kind, &m)?)?;
            let same = img.complex.homology()? == full.homology()?
                && quot.homology()? == full.homology()?;
            let pass = same && laws.iter().all(|l| l.pass);
            Ok(Outcome {
                report: with_header(
                    cli,
                    json!({
                        "kernel": laws_json(&laws),
                        "image_dims": img.complex.dims(),
                        "kernel_dims": img.kernel_dims,
                        "quotient_dims": quot.dims(),
                        "homology_preserved": same,
                    }),
                ),
                pass,
            })
        }
    }
}

/// Lattice homology of one symmetry sub-complex, degree by degree.
fn lattice_homology(
    sys: &MapSystem,
    kind: SubcomplexKind,
) -> Result<(Vec<(i32, HomologyGroup)>, Vec<usize>)> {
    let lin = free_linear(sys);
    let m = ChainModel::new(&lin);
    let gens = all_generators(kind, &m)?;
    let sub = lattice_subcomplex(&gens, &m.complex(Ring::Z)?)?;
    let ranks = (m.lo()..=m.hi()).map(|n| sub.rank(n)).collect();
    Ok((sub.complex.homology()?, ranks))
}

fn homology_rows(h: &[(i32, HomologyGroup)], expected: &[(i32, &str)]) -> (Vec<Value>, bool) {
    let mut ok = true;
    let rows = expected
        .iter()
        .map(|(n, want)| {
            let got = h.iter().find(|x| x.0 == *n).map(|x| x.1.to_string());
            let m = got.as_deref() == Some(*want);
            ok &= m;
            json!({"n": n, "expected": want, "computed": got, "match": m})
        })
        .collect();
    (rows, ok)
}

fn cmd_counterexample(cli: &Cli, which: Which) -> Result<Outcome> {
    let (body, pass) = match which {
        Which::Simplicial => {
            let x = counterexample_x(4)?;
            let lin = free_linear(&x);
            let m = ChainModel::new(&lin);
            let a = witness_cycle_a(&x)?;
            let cycle = m.boundary(3, &a.coeffs)?.is_zero();
            let boundary = solve_exact(&m.differential(4)?, &a.coeffs, Ring::Z)?.is_some();
            let (sdeg, _) = lattice_homology(&x, SubcomplexKind::SDeg)?;
            let (both, _) = lattice_homology(&x, SubcomplexKind::DegPlusSDeg)?;
            let at3 = |h: &[(i32, HomologyGroup)]| {
                h.iter()
                    .find(|x| x.0 == 3)
                    .map(|x| x.1.clone())
                    .unwrap_or_default()
            };
            let (h_s, h_b) = (at3(&sdeg), at3(&both));
            let pass = cycle && !boundary && !h_s.is_zero() && !h_b.is_zero();
            (
                json!({
                    "system": "x",
                    "witness": a.coeffs.iter().map(|(j, c)| json!([m.label(3, *j), c.to_string()])).collect::<Vec<_>>(),
                    "witness_is_cycle": cycle,
                    "witness_is_boundary": boundary,
                    "h3_sdeg": h_s.to_string(),
                    "h3_deg_plus_sdeg": h_b.to_string(),
                }),
                pass,
            )
        }
        Which::T => {
            let y = counterexample_y(YKind::T, 5)?;
            let (h, ranks) = lattice_homology(&y, SubcomplexKind::TCon)?;
            let (rows, ok) = homology_rows(&h, &[(1, "0"), (2, "0"), (3, "0"), (4, "Z/2")]);
            (
                json!({"system": "y_t", "subcomplex": "tcon", "ranks": ranks, "homology": rows}),
                ok,
            )
        }
        Which::R | Which::Rt => {
            let (kind, sub, name) = if which == Which::R {
                (YKind::R, SubcomplexKind::RCon, "y_r")
            } else {
                (YKind::Rt, SubcomplexKind::RtCon, "y_rt")
            };
            let y = counterexample_y(kind, 4)?;
            let (h, ranks) = lattice_homology(&y, sub)?;
            let (rows, mut ok) = homology_rows(&h, &[(1, "0"), (2, "0"), (3, "Z/2")]);
            let mut body = json!({"system": name, "subcomplex": sub.to_string(), "ranks": ranks, "homology": rows});
            if which == Which::R {
                let want = [0usize, 1, 3, 21, 165];
                ok &= ranks == want;
                body["expected_ranks"] = json!(want);
            }
            (body, ok)
        }
    };
    Ok(Outcome {
        report: with_header(cli, body),
        pass,
    })
}

fn cmd_bench(cli: &Cli) -> Result<Outcome> {
    check_reduction(cli)?;
    let c = &cli.common;
    let (sys, kind) = load_system(c.input.as_deref(), c.max_dim + 1, c.cap_cells)?;
    let lin = free_linear(&sys);
    let m = ChainModel::new(&lin);
    let t0 = Instant::now();
    let full = m.complex(c.ring.into())?;
    let h_full = full.homology()?;
    let t_full = t0.elapsed();
    let t1 = Instant::now();
    let red = reduced(&full, &m, c.reduce.kind())?;
    let h_red = red.as_ref().map(|r| r.homology()).transpose()?;
    let t_red = t1.elapsed();
    let target = red.as_ref().unwrap_or(&full);
    let degrees: Vec<Value> = h_full
        .iter()
        .map(|(n, _)| json!({"n": n, "dim_full": full.dim(*n), "dim_reduced": target.dim(*n)}))
        .collect();
    let agree = h_red.as_ref().is_none_or(|h| *h == h_full);
    Ok(Outcome {
        report: with_header(
            cli,
            json!({
                "system": {"kind": kind, "mode": m.mode()},
                "degrees": degrees,
                "homology_agrees": agree,
                "seconds_full": t_full.as_secs_f64(),
                "seconds_reduced": t_red.as_secs_f64(),
            }),
        ),
        pass: agree,
    })
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    match cli.command {
        Command::Homology => cmd_homology(cli),
        Command::Verify { suite } => cmd_verify(cli, suite),
        Command::Counterexample { which } => cmd_counterexample(cli, which),
        Command::Bench => cmd_bench(cli),
    }
}

/// Renders a report as an indented key/value listing with arrays of flat
/// objects laid out as tables.
pub fn render_table(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 2, out);
                    }
                    Value::Array(items)
                        if items.iter().all(Value::is_object) && !items.is_empty() =>
                    {
                        out.push_str(&format!("{pad}{k}:\n"));
                        table(items, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn table(items: &[Value], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let mut cols: Vec<String> = Vec::new();
    for it in items {
        for k in it.as_object().expect("objects only").keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    if let Some(i) = cols.iter().position(|c| c == "n") {
        let n = cols.remove(i);
        cols.insert(0, n);
    }
    {
        {}
    }
    let cells: Vec<Vec<String>> = items
        .iter()
        .map(|it| {
            cols.iter()
                .map(|c| it.get(c).map(scalar).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|r| r[i].len())
                .chain([c.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    out.push_str(&line(&cols));
    for r in &cells {
        out.push_str(&line(r));
    }
}

/// Parses arguments, runs, writes the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let text = match cli.common.format {
                Format::Json => {
                    serde_json::to_string_pretty(&out.report).expect("serializable") + "\n"
                }
                Format::Table => render_table(&out.report),
            };
            let written = match &cli.common.output {
                Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            if out.pass {
                0
            } else {
                eprintln!("error: some checks failed; see the report");
                Error::contract("").exit_code()
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
