use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hyperstrata::bounds::bound_report;
use hyperstrata::comb::{enumerate_compositions, enumerate_partitions, min_max_sets};
use hyperstrata::covering::{
    enumerate_potential_with, is_covering, known_cover_check, min_cover, CoverMethod, EnumerateOptions, FamilyReport,
};
use hyperstrata::numeric::{
    parse_system, random_realize, realize_slice, reduce_symmetric, verify_min_max, HyperbolicPoly, PolyJson,
    RealizeConfig, SearchConfig,
};
use hyperstrata::poset::{analyze, to_dot};
use hyperstrata::{Composition, Error, Partition, Result};

#[derive(Parser)]
#[command(name = "hyperstrata", version, about = "Strata posets, shellings and Vandermonde coverings of hyperbolic slices")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true, env = "HYPERSTRATA_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Compositions,
    Partitions,
    Minmax,
}

#[derive(Subcommand)]
enum Command {
    /// List compositions, partitions, or the min/max sets at level s.
    Enumerate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: u32,
        /// Number of parts.
        #[arg(long, short = 'l', alias = "s")]
        l: u32,
    },
    /// Build the poset of a facet set and run the structural checks.
    Poset {
        /// JSON list of compositions, or `@file`.
        #[arg(long)]
        facets: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
    },
    /// Face-count and covering bounds for (n, s).
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
    },
    /// Potential-poset families and Vandermonde coverings.
    Cover {
        #[command(subcommand)]
        action: CoverCommand,
    },
    /// Solve all zero-dimensional strata of H_s(F).
    Realize {
        /// JSON file `{"n":..,"coeffs":[..]}` or `{"roots":[..]}`.
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        tol_sys: Option<f64>,
        #[arg(long)]
        tol_sep: Option<f64>,
        /// Newton iterations per start.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Search for a polynomial whose slice has exactly the given facets.
    Witness {
        #[arg(long)]
        facets: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = SearchConfig::default().budget)]
        budget: usize,
    },
    /// Substitute the elementary-symmetric polynomials of each orbit type into a system.
    Reduce {
        /// JSON list of polynomials in Z1, Z2, ….
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u32,
        /// Partitions separated by `;`, e.g. "2,2,1,1;3,1,1,1".
        #[arg(long)]
        partitions: String,
        /// Search each reduced system for a real root.
        #[arg(long)]
        certify: bool,
    },
}

#[derive(Subcommand)]
enum CoverCommand {
    /// All facet sets whose poset is potential.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        up_to_reversal: bool,
        #[arg(long)]
        force: bool,
    },
    /// Smallest set of partitions covering the potential family.
    Solve {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long)]
        force: bool,
    },
    /// Check a set of partitions against the potential family.
    Check {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        partitions: String,
        #[arg(long)]
        force: bool,
    },
    /// Check that {(2,2,1,…,1)} covers the (n, n−2) family.
    Known {
        #[arg(long)]
        n: u32,
    },
}

/// Rendered output plus the exit code it should produce.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn render<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(value)),
        Format::Table => Ok(table()),
        Format::Dot => Err(Error::Domain("dot output is only available for `poset`".into())),
    }
}

fn read_arg(value: &str) -> Result<String> {
    match value.strip_prefix('@') {
        Some(path) => read_file(Path::new(path)),
        None => Ok(value.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn parse_facets(value: &str) -> Result<Vec<Composition>> {
    let text = read_arg(value)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("facets: {e}")))
}

fn parse_partitions(value: &str) -> Result<Vec<Partition>> {
    let text = read_arg(value)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| Error::Parse(format!("partitions: {e}")));
    }
    text.split(';').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

fn list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn enumerate_options(cli_force: bool, up_to_reversal: bool) -> EnumerateOptions {
    EnumerateOptions { up_to_reversal, jobs: 0, force: cli_force }
}

fn run(cli: &Cli) -> Result<Output> {
    let format = cli.format;
    if format == Format::Dot && !matches!(cli.command, Command::Poset { .. }) {
        return Err(Error::Domain("dot output is only available for `poset`".into()));
    }
    match &cli.command {
        Command::Enumerate { kind, n, l } => {
            let (n, l) = (*n, *l);
            let text = match kind {
                Kind::Compositions => {
                    let items = enumerate_compositions(n, l)?;
                    render(format, &items, || items.iter().map(|c| format!("{c}\n")).collect())?
                }
                Kind::Partitions => {
                    let items = enumerate_partitions(n, l)?;
                    render(format, &items, || items.iter().map(|p| format!("{p}\n")).collect())?
                }
                Kind::Minmax => {
                    let sets = min_max_sets(n, l)?;
                    render(format, &sets, || {
                        format!(
                            "P_min  {}\nP_max  {}\nC_min  {}\nC_max  {}\n",
                            list(&sets.p_min),
                            list(&sets.p_max),
                            list(&sets.c_min),
                            list(&sets.c_max)
                        )
                    })?
                }
            };
            Ok(Output::ok(text))
        }
        Command::Poset { facets, n, s } => {
            let facets = parse_facets(facets)?;
            let (poset, report) = analyze(&facets, *n, *s)?;
            let text = match format {
                Format::Dot => to_dot(&poset),
                Format::Json => to_json(&report),
                Format::Table => {
                    let mut t = String::new();
                    let _ = writeln!(t, "facets           {}", list(&report.facets));
                    let _ = writeln!(t, "potential        {}", report.potential);
                    if let Some(f) = &report.failure {
                        let _ = writeln!(t, "failure at       {}", f.lambda);
                    }
                    let _ = writeln!(t, "f                {:?}", report.f);
                    let _ = writeln!(t, "h                {:?}", report.h);
                    let _ = writeln!(t, "shelling         {}", list(&report.shelling));
                    let _ = writeln!(t, "shelling ok      {}", report.shelling_verified);
                    let _ = writeln!(t, "reverse ok       {}", report.reverse_shelling_verified);
                    let _ = writeln!(t, "g-theorem        {}", report.g_theorem);
                    t
                }
            };
            let structural_ok = report.potential && report.shelling_verified && report.reverse_shelling_verified;
            Ok(Output { text, code: if structural_ok { 0 } else { 3 } })
        }
        Command::Bounds { n, s } => {
            let r = bound_report(*n, *s)?;
            let text = render(format, &r, || {
                format!(
                    "f0 bound              {}\nf bound               {:?}\ncovering upper        {}\ncovering lower        {}\ncovering lower (rec)  {}\nB                     {:?}\n",
                    r.f0_bound, r.f_bound, r.covering_upper, r.covering_lower_trivial, r.covering_lower_recursive, r.b
                )
            })?;
            Ok(Output::ok(text))
        }
        Command::Cover { action } => run_cover(format, action),
        Command::Realize { poly, s, starts, tol_sys, tol_sep, max_iter } => {
            let f = HyperbolicPoly::from_json(&read_file(poly)?)?;
            let mut cfg = RealizeConfig { seed: cli.seed, ..Default::default() };
            if let Some(v) = starts {
                cfg.starts_per_dim = *v;
            }
            if let Some(v) = tol_sys {
                cfg.tol_sys = *v;
            }
            if let Some(v) = tol_sep {
                cfg.tol_sep = *v;
            }
            if let Some(v) = max_iter {
                cfg.max_iter = *v;
            }
            match realize_slice(&f, *s, &cfg) {
                Ok(r) => {
                    let min_max = if r.generic && *s >= 2 && !r.vertices.is_empty() { Some(verify_min_max(&r)?) } else { None };
                    let value = json!({ "realization": r, "min_max": min_max });
                    let text = render(format, &value, || {
                        let mut t = String::new();
                        let _ = writeln!(t, "generic   {}", r.generic);
                        let _ = writeln!(t, "facets    {}", list(&r.realized_facets));
                        for v in r.vertices.iter().chain(&r.degenerate) {
                            let _ = writeln!(t, "{:<16} x = {:?}  residual {:.2e}", v.composition.to_string(), v.x, v.residual);
                        }
                        if let Some(m) = &min_max {
                            let _ = writeln!(t, "min/max   {}", if m.passed { "passed" } else { "FAILED" });
                        }
                        t
                    })?;
                    Ok(Output::ok(text))
                }
                Err(Error::Incomplete { message, partial }) => {
                    eprintln!("error: incomplete: {message}");
                    let text = to_json(&json!({ "incomplete": message, "partial": partial }));
                    Ok(Output { text, code: 4 })
                }
                Err(e) => Err(e),
            }
        }
        Command::Witness { facets, n, s, budget } => {
            let target = parse_facets(facets)?;
            let cfg = SearchConfig { budget: *budget, seed: cli.seed, ..Default::default() };
            let w = random_realize(&target, *n, *s, &cfg)?;
            let value = json!({ "schema": hyperstrata::SCHEMA_VERSION, "found": w.is_some(), "seed": cli.seed, "witness": w });
            let text = render(format, &value, || match &w {
                Some(w) => format!("found     true\nroots     {:?}\nevaluated {}\n", w.roots, w.evaluations),
                None => "found     false\n".into(),
            })?;
            Ok(Output::ok(text))
        }
        Command::Reduce { system, n, partitions, certify } => {
            let sys = parse_system(&read_file(system)?)?;
            let parts = parse_partitions(partitions)?;
            let reduced = reduce_symmetric(&sys, *n, &parts, certify.then_some(cli.seed))?;
            let value = json!({ "schema": hyperstrata::SCHEMA_VERSION, "n": n, "reduced": reduced });
            let text = render(format, &value, || {
                let mut t = String::new();
                for r in &reduced {
                    let _ = writeln!(t, "{}:", r.partition);
                    for p in &r.polynomials {
                        let _ = writeln!(t, "  {} = 0", poly_text(p));
                    }
                    if let Some(c) = &r.certificate {
                        let _ = writeln!(t, "  root {c:?}");
                    }
                }
                t
            })?;
            Ok(Output::ok(text))
        }
    }
}

fn poly_text(p: &PolyJson) -> String {
    if p.terms.is_empty() {
        return "0".into();
    }
    p.terms
        .iter()
        .map(|t| {
            let mono: Vec<String> =
                t.monomial.iter().map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") }).collect();
            if mono.is_empty() {
                t.coef.clone()
            } else {
                format!("{}*{}", t.coef, mono.join("*"))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn run_cover(format: Format, action: &CoverCommand) -> Result<Output> {
    match action {
        CoverCommand::Enumerate { n, s, up_to_reversal, force } => {
            let family = enumerate_potential_with(*n, *s, enumerate_options(*force, *up_to_reversal))?;
            let report = FamilyReport::new(*n, *s, *up_to_reversal, family);
            let text = render(format, &report, || {
                let mut t = format!("{} facet sets\n", report.count);
                for set in &report.family {
                    let _ = writeln!(t, "{}", list(set));
                }
                t
            })?;
            Ok(Output::ok(text))
        }
        CoverCommand::Solve { n, s, method, force } => {
            let method: CoverMethod = method.parse()?;
            let family = enumerate_potential_with(*n, *s, enumerate_options(*force, false))?;
            let inst = min_cover(&family, *n, *s, method)?;
            let text = render(format, &inst, || {
                format!(
                    "solution  {}\nsize      {}\noptimal   {}\nbounds    [{}, {}]\nfamily    {}\nnote      {}\n",
                    list(&inst.solution),
                    inst.size,
                    inst.optimal,
                    inst.lower_bound,
                    inst.upper_bound,
                    inst.family_size,
                    inst.caveat
                )
            })?;
            Ok(Output::ok(text))
        }
        CoverCommand::Check { n, s, partitions, force } => {
            let parts = parse_partitions(partitions)?;
            let family = enumerate_potential_with(*n, *s, enumerate_options(*force, false))?;
            let check = is_covering(&parts, &family)?;
            let entries: Vec<_> = family
                .iter()
                .zip(&check.witnesses)
                .map(|(set, w)| json!({ "facets": set, "witness": w }))
                .collect();
            let value = json!({
                "schema": hyperstrata::SCHEMA_VERSION,
                "n": n,
                "s": s,
                "partitions": parts,
                "covered": check.covered,
                "sets": entries,
            });
            let text = render(format, &value, || {
                let mut t = format!("covered {}\n", check.covered);
                for (set, w) in family.iter().zip(&check.witnesses) {
                    let w = w.as_ref().map_or("-".to_string(), |w| format!("{} <= {}", w.lambda, w.partition));
                    let _ = writeln!(t, "{:<48} {w}", list(set));
                }
                t
            })?;
            Ok(Output::ok(text))
        }
        CoverCommand::Known { n } => {
            let ok = known_cover_check(*n)?;
            let value = json!({ "schema": hyperstrata::SCHEMA_VERSION, "n": n, "covered": ok });
            let text = render(format, &value, || format!("covered {ok}\n"))?;
            Ok(Output::ok(text))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
