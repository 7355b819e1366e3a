use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use gqcov::automorphisms::{
    automorphism_group, coloured_automorphism_group, extend_automorphism, find_isomorphism, ExtensionMode, Permutation, DEFAULT_BUDGET,
};
use gqcov::constructions::{build_family, Family};
use gqcov::covers::{
    condition_c_instances, condition_c_planarity, enumerate_covers, factorize_lower, identify_chi_prime, reconstruct_chi, GeometryMorphism,
    Reading,
};
use gqcov::io::{read_embedding, read_geometry, read_json, read_pair_dir, write_embedding, write_geometry, write_json, write_pair_dir, Report};
use gqcov::kk_census::{census_report, enumerate_subgqs_through_line, EnumerationOptions};
use gqcov::spg::{verify_spg, SPGParameters};
use gqcov::suites::{run_suite, SuiteName, SuiteOptions};
use gqcov::subtension::build_derived_pair;
use gqcov::{Error, Result};

#[derive(Parser)]
#[command(name = "gqcov", version, about = "Verification runs for generalized quadrangles and covers of their ovoid geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ReadingArg {
    Literal,
    Configuration,
}

#[derive(Subcommand)]
enum Command {
    /// Build a geometry and write it, with its subquadrangle as `<stem>.embedding.json`.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        sigma: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build 𝒜, ℰ and π for an embedding and write them to a pair directory.
    Subtend {
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Factorize a cover 𝒜 → ℰ as α ∘ π.
    Factorize {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        cover: PathBuf,
    },
    /// Enumerate every cover 𝒜 → ℰ and compare the count with |Aut(ℰ)|.
    EnumerateCovers {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the covers to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the quadrangle χ from a cover 𝒜 → ℰ.
    Reconstruct {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Sample W-sets and test their planarity.
    ConditionC {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "configuration")]
        reading: ReadingArg,
    },
    /// Automorphism group of a geometry, or of a set of its points and lines.
    Aut {
        #[arg(long)]
        geometry: PathBuf,
        /// A file {"points": [...], "lines": [...]} to stabilize.
        #[arg(long)]
        stabilize: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Extend an automorphism of the subquadrangle to the ambient quadrangle.
    Extend {
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        /// Find every extension instead of one.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Enumerate the subquadrangles through [∞] of a Kantor-Knuth quadrangle.
    KkCensus {
        #[arg(long, default_value_t = 9)]
        q: usize,
        #[arg(long)]
        sigma: Option<u32>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Measure semipartial geometry parameters.
    SpgCheck {
        #[arg(long)]
        geometry: PathBuf,
        /// Expected parameters as s,t,a,m.
        #[arg(long)]
        expect: Option<SPGParameters>,
    },
    /// Run a named suite and write its manifest.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        no_build: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Deserialize)]
struct Subset {
    #[serde(default)]
    points: Vec<usize>,
    #[serde(default)]
    lines: Vec<usize>,
}

fn emit<T: Serialize>(report: &Report<T>) -> Result<bool> {
    println!("{}", serde_json::to_string_pretty(report)?);
    Ok(report.verdict == gqcov::io::Verdict::Pass)
}

fn companion(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.embedding.json"))
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Construct { family, q, sigma, out } => {
            let built = build_family(family, q, sigma)?;
            write_geometry(&out, &built.geometry)?;
            let embedding = match &built.embedding {
                Some(e) => {
                    let path = companion(&out);
                    write_embedding(&path, e)?;
                    Some(path)
                }
                None => None,
            };
            let order = built.geometry.verify_gq_axioms();
            let body = json!({
                "name": built.geometry.name(),
                "points": built.geometry.point_count(),
                "lines": built.geometry.line_count(),
                "order": order.as_ref().ok(),
                "violation": order.as_ref().err().map(|v| v.to_string()),
                "embedding": embedding,
                "sub_order": built.embedding.as_ref().and_then(|e| e.sub_order()),
                "infinity_line": built.infinity_line,
                "classical": built.classical,
            });
            emit(&Report::new("construct", order.is_ok(), body))
        }
        Command::Subtend { ambient, embedding, out } => {
            let g = Arc::new(read_geometry(&ambient)?);
            let emb = read_embedding(&embedding, g)?;
            let pair = build_derived_pair(&emb)?;
            write_pair_dir(&out, &pair)?;
            let body = json!({
                "census": pair.census,
                "a": [pair.a.point_count(), pair.a.line_count()],
                "e": [pair.e.point_count(), pair.e.line_count()],
                "pi_is_cover": pair.is_cover_certified(),
            });
            emit(&Report::new("subtend", pair.is_cover_certified(), body))
        }
        Command::Factorize { pair, cover } => {
            let pair = read_pair_dir(&pair)?;
            let gamma: GeometryMorphism = read_json(&cover)?;
            let body = match factorize_lower(&pair, &gamma) {
                Ok(f) => Report::new("factorize", true, json!({ "factorization": f })),
                Err(e) => Report::new("factorize", false, json!({ "error": e.to_string() })),
            };
            emit(&body)
        }
        Command::EnumerateCovers { pair, budget, out } => {
            let pair = read_pair_dir(&pair)?;
            let covers = enumerate_covers(&pair.a, &pair.e, u64::MAX)?;
            let aut = automorphism_group(&pair.e, budget)?.order();
            if let Some(out) = out {
                write_json(&out, &covers)?;
            }
            let ok = covers.len() as u128 == aut;
            emit(&Report::new("enumerate-covers", ok, json!({ "covers": covers.len(), "aut_e_order": aut })))
        }
        Command::Reconstruct { pair, cover, budget } => {
            let pair = read_pair_dir(&pair)?;
            let gamma: GeometryMorphism = read_json(&cover)?;
            let rec = reconstruct_chi(&pair, &pair.a, &gamma)?;
            let iso = find_isomorphism(&rec.chi, pair.ambient(), budget)?.is_some();
            let identified = identify_chi_prime(&rec, &pair);
            let body = json!({
                "order": rec.order,
                "isomorphic_to_ambient": iso,
                "chi_prime_identified": identified.is_ok(),
                "error": identified.as_ref().err().map(|e| e.to_string()),
            });
            emit(&Report::new("reconstruct", iso && identified.is_ok(), body))
        }
        Command::ConditionC { pair, samples, seed, reading } => {
            let pair = read_pair_dir(&pair)?;
            let reading = match reading {
                ReadingArg::Literal => Reading::Literal,
                ReadingArg::Configuration => Reading::Configuration,
            };
            let inst = condition_c_instances(&pair, samples, seed, reading, 1_000_000)?;
            let mut rows = Vec::with_capacity(inst.len());
            let mut ok = true;
            for i in &inst {
                let planar = condition_c_planarity(&pair, i)?;
                ok &= planar == (i.m_set.len() == 1);
                rows.push(json!({ "m": i.m_set.len(), "variant": i.variant, "w": i.w, "coplanar": planar }));
            }
            emit(&Report::new("condition-c", ok, json!({ "seed": seed, "instances": rows })))
        }
        Command::Aut { geometry, stabilize, budget } => {
            let g = read_geometry(&geometry)?;
            let group = match stabilize {
                Some(path) => {
                    let set: Subset = read_json(&path)?;
                    let mut pc = vec![0u32; g.point_count()];
                    let mut lc = vec![0u32; g.line_count()];
                    for &p in &set.points {
                        g.ensure_point(p)?;
                        pc[p] = 1;
                    }
                    for &l in &set.lines {
                        *lc.get_mut(l).ok_or_else(|| Error::input(format!("line {l} out of range")))? = 1;
                    }
                    coloured_automorphism_group(&g, &pc, &lc, budget)?
                }
                None => automorphism_group(&g, budget)?,
            };
            let body = json!({ "order": group.order().to_string(), "generators": group.generators().len(), "base": group.base() });
            emit(&Report::new("aut", true, body))
        }
        Command::Extend { ambient, embedding, phi, all, budget } => {
            let g = Arc::new(read_geometry(&ambient)?);
            let emb = read_embedding(&embedding, g)?;
            let phi: Permutation = read_json(&phi)?;
            let mode = if all { ExtensionMode::FindAll } else { ExtensionMode::FindOne };
            let rep = extend_automorphism(&emb, &phi, mode, budget)?;
            let body = json!({ "extensions": rep.extensions, "count": rep.extensions.len(), "kernel_order": rep.kernel_order });
            emit(&Report::new("extend", !rep.extensions.is_empty(), body))
        }
        Command::KkCensus { q, sigma, checkpoint, out, threads } => {
            let built = build_family(Family::Kk, q, sigma)?;
            let infinity = built.infinity_line.expect("Kantor-Knuth constructions mark [∞]");
            let opts = EnumerationOptions { checkpoint, threads, closure_budget: None };
            let en = enumerate_subgqs_through_line(&built.geometry, infinity, &opts)?;
            let report = census_report(&en.records)?;
            write_json(&out, &report)?;
            let check = report.check(q);
            let body = json!({ "report": report, "complete": en.complete, "error": check.as_ref().err().map(|e| e.to_string()) });
            emit(&Report::new("kk-census", en.complete && check.is_ok(), body))
        }
        Command::SpgCheck { geometry, expect } => {
            let g = read_geometry(&geometry)?;
            let body = match verify_spg(&g, expect) {
                Ok(m) => Report::new("spg-check", true, json!({ "measured": m, "parameters": m.to_string() })),
                Err(f) => Report::new("spg-check", false, json!({ "failure": f.to_string() })),
            };
            emit(&body)
        }
        Command::Suite { name, out, seed, budget, no_build, checkpoint, threads } => {
            let opts = SuiteOptions { seed, budget, no_build, checkpoint, threads, ..SuiteOptions::new(out) };
            let manifest = run_suite(name, &opts)?;
            println!("{}", serde_json::to_string_pretty(&manifest)?);
            if let Some(f) = &manifest.first_failure {
                eprintln!("suite {} failed at {f}", name.as_str());
            }
            Ok(manifest.exit_code() == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
