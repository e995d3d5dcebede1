use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use necklace_core::density::{hom_density, necklace_density, weighted_hom_count};
use necklace_core::graphs::{base_graph, necklace, qify, Graph};
use necklace_core::induced::{GlueConditions, Verification};
use necklace_core::io::{
    profile_csv, read_graph, read_kernel, read_kernels, read_polynomial, read_rooted, read_weighted, to_json, Exact,
    ExponentReportDoc, Float, GraphDoc, KernelDoc, PolynomialDoc, ProfileRow, QuantumGraphDoc,
};
use necklace_core::numeric::{format_g17, format_rational, parse_rational, rational_to_f64, Rational};
use necklace_core::profile::{profile_point, realize_glued, realize_vector, region_contains, MassScheme};
use necklace_core::quantum::recognize_necklace;
use necklace_core::reduction::{
    build_pbar, compile_f, scan_integer_grid, scan_reciprocal_grid, scan_region_grid, verify_reduction, x_vars,
    GridWitness,
};
use necklace_core::{DensityMethod, Error, ExactKernel, IntPolynomial, RegionQuery};
use serde::Serialize;

use crate::{Cli, Command, Format, Global, Grid, Method, PolyInput};

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(Error::invalid("threads", "must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Density { graph, kernel, method } => density(g, &graph, &kernel, method),
        Command::Hom { graph, weighted } => hom(g, &graph, &weighted),
        Command::Necklace { c, q } => {
            format_check(g, &[Format::Json])?;
            emit(g, &to_json(&GraphDoc::from(&necklace(c, q)?)))
        }
        Command::Qify { graph, base, q } => {
            format_check(g, &[Format::Json])?;
            let source = match (graph, base) {
                (Some(path), _) => read_graph(&read(&path)?)?,
                (None, Some(name)) => base_graph(&name)?.into_graph(),
                (None, None) => unreachable!("clap requires one of --graph and --base"),
            };
            emit(g, &to_json(&GraphDoc::from(&qify(&source, q)?)))
        }
        Command::Profile { kernel, ell } => profile(g, &kernel, ell),
        Command::RegionCheck { x, y, tolerance } => region_check(g, x, y, tolerance),
        Command::Realize { r, base, masses, rooted } => realize(g, &r, &base, masses, &rooted),
        Command::Pbar { input, ell } => pbar(g, &input, ell),
        Command::Reduce { input, ell } => reduce(g, &input, ell),
        Command::Verify { input, ell, samples, tol } => verify(g, &input, ell, samples, tol),
        Command::Scan { input, ell, grid, n_max } => scan(g, &input, ell, grid, n_max),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The requested format, or the first of `allowed` when none was given.
fn format_check(g: &Global, allowed: &[Format]) -> Result<Format> {
    match g.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => {
            Err(Error::invalid("format", format!("{f:?} output is not available for this command").to_lowercase())
                .into())
        }
    }
}

fn read_poly(input: &PolyInput, ell: Option<usize>) -> Result<(IntPolynomial, usize)> {
    let p = match (&input.poly, &input.expr) {
        (Some(path), _) => read_polynomial(&read(path)?)?,
        (None, Some(text)) => IntPolynomial::parse(text, x_vars(ell.unwrap_or(2)))?,
        (None, None) => unreachable!("clap requires --poly or --expr"),
    };
    let ell = ell.unwrap_or(p.arity() + 1);
    Ok((p, ell))
}

/// t(H, W) as a product over components, each a necklace or a single vertex.
fn spectral_density(h: &Graph, w: &ExactKernel) -> Result<f64> {
    let mut value = 1.0;
    for part in h.components() {
        if part.len() == 1 {
            continue;
        }
        let component = h.induced_subgraph(&part);
        let Some((c, q)) = recognize_necklace(&component) else {
            return Err(Error::invalid(
                "method",
                "the spectral method needs every component to be a cycle or a necklace; use --method brute",
            )
            .into());
        };
        value *= necklace_density(c, q, w, DensityMethod::Spectral)?;
    }
    Ok(value)
}

#[derive(Serialize)]
struct DensityDoc {
    method: &'static str,
    value: Float,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn density(g: &Global, graph: &Path, kernel: &Path, method: Method) -> Result<()> {
    let format = format_check(g, &[Format::Text, Format::Json, Format::Csv])?;
    let h = read_graph(&read(graph)?)?;
    let w = read_kernel(&read(kernel)?)?;
    let doc = match method {
        Method::Brute => {
            let exact = hom_density(&h, &w)?;
            DensityDoc { method: "brute", value: Float(rational_to_f64(&exact)), exact: Some(format_rational(&exact)) }
        }
        Method::Spectral => DensityDoc { method: "spectral", value: Float(spectral_density(&h, &w)?), exact: None },
    };
    let text = match format {
        Format::Text => format!("{}\n", format_g17(doc.value.0)),
        Format::Json => to_json(&doc),
        Format::Csv => format!(
            "method,value,exact\n{},{},{}\n",
            doc.method,
            format_g17(doc.value.0),
            doc.exact.as_deref().unwrap_or("")
        ),
    };
    emit(g, &text)
}

fn hom(g: &Global, graph: &Path, weighted: &Path) -> Result<()> {
    let format = format_check(g, &[Format::Text, Format::Json])?;
    let h = read_graph(&read(graph)?)?;
    let target = read_weighted(&read(weighted)?)?;
    let count: Rational = weighted_hom_count(&h, &target)?;
    let text = match format {
        Format::Json => to_json(&CountDoc { count: Exact(count) }),
        _ => format!("{}\n", format_rational(&count)),
    };
    emit(g, &text)
}

#[derive(Serialize)]
struct CountDoc {
    count: Exact,
}

#[derive(Serialize)]
struct ProfileDoc {
    kernel: usize,
    q: usize,
    x: Option<Float>,
    y: Option<Float>,
    in_region: bool,
}

fn profile(g: &Global, kernel: &Path, ell: usize) -> Result<()> {
    let format = format_check(g, &[Format::Csv, Format::Json, Format::Text])?;
    if ell < 2 {
        return Err(Error::invalid("ell", format!("must be at least 2, got {ell}")).into());
    }
    let kernels = read_kernels(&read(kernel)?)?;
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    for (k, w) in kernels.iter().enumerate() {
        for q in 2..=ell {
            let point = match profile_point(w, q) {
                Ok(p) => Some(p),
                Err(Error::VanishingDenominator { .. }) => None,
                Err(e) => return Err(e).with_context(|| format!("kernel {k}, q = {q}")),
            };
            rows.push(ProfileRow { q, point });
            docs.push(ProfileDoc {
                kernel: k,
                q,
                x: point.map(|p| Float(p.x)),
                y: point.map(|p| Float(p.y)),
                in_region: point.is_some_and(|p| region_contains(&query(p.x, p.y))),
            });
        }
    }
    let text = match format {
        Format::Json => to_json(&docs),
        _ => profile_csv(&rows),
    };
    emit(g, &text)
}

fn query(x: f64, y: f64) -> RegionQuery {
    RegionQuery { x, y, tolerance: necklace_core::config::FLOAT_REL_TOL }
}

#[derive(Serialize)]
struct RegionDoc {
    x: Float,
    y: Float,
    tolerance: Float,
    in_region: bool,
}

fn region_check(g: &Global, x: f64, y: f64, tolerance: f64) -> Result<()> {
    let format = format_check(g, &[Format::Text, Format::Json, Format::Csv])?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::invalid("x, y", "coordinates must be finite").into());
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::invalid("tolerance", "must be nonnegative").into());
    }
    let inside = region_contains(&RegionQuery { x, y, tolerance });
    let text = match format {
        Format::Text => format!("{inside}\n"),
        Format::Json => {
            to_json(&RegionDoc { x: Float(x), y: Float(y), tolerance: Float(tolerance), in_region: inside })
        }
        Format::Csv => format!("x,y,in_region\n{},{},{}\n", format_g17(x), format_g17(y), inside as u8),
    };
    emit(g, &text)
}

#[derive(Serialize)]
struct PartDoc {
    vertices: usize,
    copies: usize,
    copy_mass: String,
}

#[derive(Serialize)]
struct PointDoc {
    q: usize,
    x: Float,
    y: Float,
    in_region: bool,
}

#[derive(Serialize)]
struct GlueDoc {
    all_hold: bool,
    admissible: Vec<bool>,
    has_triangle: Vec<bool>,
    three_connected: Vec<bool>,
    roots_fixed: Vec<&'static str>,
    pairwise_separated: &'static str,
    warnings: Vec<String>,
}

fn verification(v: &Verification) -> &'static str {
    match v {
        Verification::Verified(true) => "holds",
        Verification::Verified(false) => "fails",
        Verification::Trusted => "assumed",
    }
}

impl From<&GlueConditions> for GlueDoc {
    fn from(c: &GlueConditions) -> Self {
        GlueDoc {
            all_hold: c.all_hold(),
            admissible: c.admissible.clone(),
            has_triangle: c.has_triangle.clone(),
            three_connected: c.three_connected.clone(),
            roots_fixed: c.roots_fixed.iter().map(verification).collect(),
            pairwise_separated: verification(&c.pairwise_separated),
            warnings: c.warnings(),
        }
    }
}

#[derive(Serialize)]
struct RealizeDoc {
    base: String,
    r: Vec<usize>,
    parts: Vec<PartDoc>,
    predicted: Vec<PointDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    glue_conditions: Option<GlueDoc>,
    graph: GraphDoc,
    kernel: KernelDoc,
}

fn realize(
    g: &Global,
    r: &[usize],
    base: &str,
    masses: Option<Vec<String>>,
    rooted: &[std::path::PathBuf],
) -> Result<()> {
    format_check(g, &[Format::Json])?;
    let base_graph = base_graph(base)?;
    let scheme = match masses {
        None => MassScheme::VertexProportional,
        Some(ms) => MassScheme::Custom(
            ms.iter()
                .enumerate()
                .map(|(i, m)| parse_rational(m).map_err(|e| Error::invalid(format!("masses[{i}]"), e.to_string())))
                .collect::<necklace_core::Result<_>>()?,
        ),
    };
    let real = if rooted.is_empty() {
        realize_vector(r, &base_graph, &scheme)?
    } else {
        let hs = rooted.iter().map(|p| Ok(read_rooted(&read(p)?)?)).collect::<Result<Vec<_>>>()?;
        realize_glued(r, &hs, &base_graph, &scheme)?
    };
    if let Some(c) = &real.glue_conditions {
        if !c.all_hold() {
            eprintln!("warning: the glued family does not satisfy every realization condition");
        }
        for w in c.warnings() {
            eprintln!("warning: {w}");
        }
    }
    let doc = RealizeDoc {
        base: base.to_string(),
        r: r.to_vec(),
        parts: real
            .parts
            .iter()
            .map(|p| PartDoc { vertices: p.vertices, copies: p.copies, copy_mass: format_rational(&p.copy_mass) })
            .collect(),
        predicted: real
            .predicted
            .iter()
            .map(|p| PointDoc { q: p.q, x: Float(p.x), y: Float(p.y), in_region: region_contains(&query(p.x, p.y)) })
            .collect(),
        glue_conditions: real.glue_conditions.as_ref().map(GlueDoc::from),
        graph: GraphDoc::from(&real.graph),
        kernel: KernelDoc::from(&real.kernel),
    };
    emit(g, &to_json(&doc))
}

fn pbar(g: &Global, input: &PolyInput, ell: Option<usize>) -> Result<()> {
    let format = format_check(g, &[Format::Json, Format::Text])?;
    let (p, _) = read_poly(input, ell)?;
    let pb = build_pbar(&p)?;
    let text = match format {
        Format::Text => format!("{pb}\n"),
        _ => to_json(&PolynomialDoc::from(&pb)),
    };
    emit(g, &text)
}

#[derive(Serialize)]
struct ReduceDoc {
    exponents: ExponentReportDoc,
    quantum_graph: QuantumGraphDoc,
}

/// With `--out` the quantum graph goes to the file and the exponent report to
/// standard output; otherwise both go to standard output in one document.
fn reduce(g: &Global, input: &PolyInput, ell: Option<usize>) -> Result<()> {
    format_check(g, &[Format::Json])?;
    let (p, ell) = read_poly(input, ell)?;
    let compiled = compile_f(&p, ell)?;
    let exponents = ExponentReportDoc::from(&compiled.exponents);
    let quantum_graph = QuantumGraphDoc::from(&compiled.quantum_graph);
    if g.out.is_some() {
        emit(g, &to_json(&quantum_graph))?;
        print!("{}", to_json(&exponents));
        Ok(())
    } else {
        emit(g, &to_json(&ReduceDoc { exponents, quantum_graph }))
    }
}

#[derive(Serialize)]
struct SampleDoc {
    seed: u64,
    blocks: usize,
    quantum: Float,
    substituted: Option<Float>,
    rel_dev: Option<Float>,
    multiplier: Float,
}

#[derive(Serialize)]
struct GridWitnessDoc {
    ns: Vec<u64>,
    value: String,
}

impl From<&GridWitness> for GridWitnessDoc {
    fn from(w: &GridWitness) -> Self {
        GridWitnessDoc { ns: w.ns.clone(), value: format_rational(&w.value) }
    }
}

#[derive(Serialize)]
struct WitnessDoc {
    grid: GridWitnessDoc,
    kernel_cliques: Option<u64>,
    value: Option<Float>,
}

#[derive(Serialize)]
struct VerifyDoc {
    ell: usize,
    pbar: String,
    exponents: ExponentReportDoc,
    tolerance: Float,
    max_rel_dev: Float,
    identity_holds: bool,
    multipliers_nonnegative: bool,
    witness: Option<WitnessDoc>,
    samples: Vec<SampleDoc>,
}

fn verify(g: &Global, input: &PolyInput, ell: Option<usize>, samples: usize, tol: f64) -> Result<()> {
    let format = format_check(g, &[Format::Json, Format::Text])?;
    let (p, ell) = read_poly(input, ell)?;
    let report = verify_reduction(&p, ell, samples, g.seed, tol)?;
    let doc = VerifyDoc {
        ell,
        pbar: report.compiled.pbar.to_string(),
        exponents: ExponentReportDoc::from(&report.compiled.exponents),
        tolerance: Float(report.tolerance),
        max_rel_dev: Float(report.max_rel_dev),
        identity_holds: report.identity_holds(),
        multipliers_nonnegative: report.multipliers_nonnegative(),
        witness: report.witness.as_ref().map(|w| WitnessDoc {
            grid: GridWitnessDoc::from(&w.grid),
            kernel_cliques: w.kernel_cliques,
            value: w.value.map(Float),
        }),
        samples: report
            .samples
            .iter()
            .map(|s| SampleDoc {
                seed: s.seed,
                blocks: s.blocks,
                quantum: Float(s.quantum),
                substituted: s.substituted.map(Float),
                rel_dev: s.rel_dev.map(Float),
                multiplier: Float(s.multiplier),
            })
            .collect(),
    };
    let text = match format {
        Format::Text => {
            let mut t = String::new();
            writeln!(t, "pbar: {}", doc.pbar)?;
            writeln!(t, "samples: {}", doc.samples.len())?;
            writeln!(t, "max relative deviation: {}", format_g17(report.max_rel_dev))?;
            writeln!(t, "identity holds: {}", doc.identity_holds)?;
            writeln!(t, "multipliers nonnegative: {}", doc.multipliers_nonnegative)?;
            match &report.witness {
                Some(w) => writeln!(
                    t,
                    "witness: n = {:?}, p = {}, t(f(p), W) = {}",
                    w.grid.ns,
                    format_rational(&w.grid.value),
                    w.value.map_or("n/a".into(), format_g17)
                )?,
                None => writeln!(t, "witness: none")?,
            }
            t
        }
        _ => to_json(&doc),
    };
    emit(g, &text)?;
    if !report.identity_holds() {
        return Err(Error::IdentityViolation(format!(
            "max relative deviation {:e} exceeds {:e}",
            report.max_rel_dev, report.tolerance
        ))
        .into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanDoc {
    grid: &'static str,
    n_max: u64,
    witness: Option<ScanWitnessDoc>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ScanWitnessDoc {
    Grid(GridWitnessDoc),
    Region { point: Vec<[String; 2]>, value: String },
}

fn scan(g: &Global, input: &PolyInput, ell: Option<usize>, grid: Grid, n_max: u64) -> Result<()> {
    let format = format_check(g, &[Format::Json, Format::Text])?;
    let (p, _) = read_poly(input, ell)?;
    if n_max == 0 {
        bail!(Error::invalid("n-max", "must be at least 1"));
    }
    let (name, witness) = match grid {
        Grid::Reciprocal => {
            ("reciprocal", scan_reciprocal_grid(&p, n_max)?.as_ref().map(|w| ScanWitnessDoc::Grid(w.into())))
        }
        Grid::Integer => ("integer", scan_integer_grid(&p, n_max)?.as_ref().map(|w| ScanWitnessDoc::Grid(w.into()))),
        Grid::Region => {
            let found = scan_region_grid(&build_pbar(&p)?, n_max)?;
            let doc = found.map(|w| ScanWitnessDoc::Region {
                point: w.point.iter().map(|(x, y)| [format_rational(x), format_rational(y)]).collect(),
                value: format_rational(&w.value),
            });
            ("region", doc)
        }
    };
    let text = match format {
        Format::Text => match &witness {
            None => "none\n".to_string(),
            Some(ScanWitnessDoc::Grid(w)) => format!("n = {:?}: {}\n", w.ns, w.value),
            Some(ScanWitnessDoc::Region { point, value }) => {
                let pts: Vec<String> = point.iter().map(|[x, y]| format!("({x}, {y})")).collect();
                format!("{}: {value}\n", pts.join(" "))
            }
        },
        _ => to_json(&ScanDoc { grid: name, n_max, witness }),
    };
    emit(g, &text)
}

/// Exit status for a failed command: 2 for numeric and guard failures, 1 for
/// everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>().map(Error::class) {
        Some(necklace_core::ErrorClass::Numeric) => 2,
        _ => 1,
    }
}
