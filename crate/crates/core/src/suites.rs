//! Named verification runs. Each run loads or builds its constructions through a cache,
//! performs a fixed list of checks and writes `manifest.json` to its output directory.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automorphisms::{
    aut_e_two_ways, automorphism_group, decompose_higher, extend_automorphism, find_isomorphism, generator_permutations,
    higher_decomposition_check, ExtensionMode, Permutation, DEFAULT_BUDGET,
};
use crate::constructions::{build_family, build_grid, Family};
use crate::covers::{
    condition_c_instances, condition_c_planarity, enumerate_covers, factorize_lower, identify_chi_prime, reconstruct_chi,
    verify_initial_object, FactorizationResult, GeometryMorphism, Orientation, Reading,
};
use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;
use crate::io::{read_geometry, read_json, write_geometry, write_json, EmbeddingFile, Verdict, SCHEMA_VERSION};
use crate::kk_census::{census_report, enumerate_subgqs_through_line, EnumerationOptions};
use crate::spg::{alpha_witness_check, hypothesis_gate, verify_spg, SPGParameters};
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::{build_derived_pair, theta_census, DerivedPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    LowerQ2,
    LowerQ3,
    SpgAll,
    Reconstruct,
    ExtensionGrid,
    HigherQ2q3,
    KkQ9,
}

impl SuiteName {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::LowerQ2 => "lower-q2",
            SuiteName::LowerQ3 => "lower-q3",
            SuiteName::SpgAll => "spg-all",
            SuiteName::Reconstruct => "reconstruct",
            SuiteName::ExtensionGrid => "extension-grid",
            SuiteName::HigherQ2q3 => "higher-q2q3",
            SuiteName::KkQ9 => "kk-q9",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub out: PathBuf,
    pub seed: u64,
    pub budget: u64,
    /// Fail with [`Error::Missing`] instead of building a construction absent from the cache.
    pub no_build: bool,
    /// Construction cache; `<out>/cache` when absent.
    pub cache: Option<PathBuf>,
    /// Resumable state for the long census; `<out>/checkpoint` when absent.
    pub checkpoint: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl SuiteOptions {
    /// Defaults, with the cache directory taken from `GQCOV_CACHE` when set.
    pub fn new(out: impl Into<PathBuf>) -> SuiteOptions {
        SuiteOptions {
            out: out.into(),
            seed: 0,
            budget: DEFAULT_BUDGET,
            no_build: false,
            cache: std::env::var_os("GQCOV_CACHE").map(PathBuf::from),
            checkpoint: None,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteParameters {
    pub seed: u64,
    pub budget: u64,
    pub no_build: bool,
}

/// Everything except `timings` is a function of the inputs and parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub suite: SuiteName,
    pub parameters: SuiteParameters,
    /// SHA-256 of each construction file, keyed by its path inside the cache.
    pub inputs: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub first_failure: Option<String>,
    /// Seconds per check.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    /// The manifest without its timing block, as compared across reruns.
    pub fn without_timings(&self) -> RunManifest {
        RunManifest { timings: BTreeMap::new(), ..self.clone() }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

struct Loaded {
    geometry: Arc<IncidenceStructure>,
    embedding: Option<SubGeometryEmbedding>,
    infinity_line: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct LineFile {
    infinity_line: usize,
}

struct Run<'a> {
    opts: &'a SuiteOptions,
    cache: PathBuf,
    checks: Vec<Check>,
    timings: BTreeMap<String, f64>,
    inputs: BTreeMap<String, String>,
    loaded: HashMap<(Family, usize), Arc<Loaded>>,
    pairs: HashMap<(Family, usize), Arc<DerivedPair>>,
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

fn family_name(f: Family) -> String {
    f.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl<'a> Run<'a> {
    fn new(opts: &'a SuiteOptions) -> Run<'a> {
        let cache = opts.cache.clone().unwrap_or_else(|| opts.out.join("cache"));
        Run {
            opts,
            cache,
            checks: Vec::new(),
            timings: BTreeMap::new(),
            inputs: BTreeMap::new(),
            loaded: HashMap::new(),
            pairs: HashMap::new(),
        }
    }

    fn load(&mut self, family: Family, q: usize) -> Result<Arc<Loaded>> {
        if let Some(l) = self.loaded.get(&(family, q)) {
            return Ok(l.clone());
        }
        let key = format!("{}-{q}", family_name(family));
        let dir = self.cache.join(&key);
        let geometry_path = dir.join("geometry.json");
        let embedding_path = dir.join("embedding.json");
        let line_path = dir.join("infinity.json");
        if !geometry_path.exists() {
            if self.opts.no_build {
                return Err(Error::Missing(format!("{} (construction {key} is not cached and building is disabled)", geometry_path.display())));
            }
            let built = build_family(family, q, None)?;
            write_geometry(&geometry_path, &built.geometry)?;
            if let Some(e) = &built.embedding {
                write_json(&embedding_path, &EmbeddingFile::from_embedding(e))?;
            }
            if let Some(l) = built.infinity_line {
                write_json(&line_path, &LineFile { infinity_line: l })?;
            }
        }
        let geometry = Arc::new(read_geometry(&geometry_path)?);
        self.inputs.insert(format!("{key}/geometry.json"), sha256_file(&geometry_path)?);
        let embedding = if embedding_path.exists() {
            self.inputs.insert(format!("{key}/embedding.json"), sha256_file(&embedding_path)?);
            Some(read_json::<EmbeddingFile>(&embedding_path)?.into_embedding(geometry.clone())?)
        } else {
            None
        };
        let infinity_line = if line_path.exists() {
            self.inputs.insert(format!("{key}/infinity.json"), sha256_file(&line_path)?);
            Some(read_json::<LineFile>(&line_path)?.infinity_line)
        } else {
            None
        };
        let loaded = Arc::new(Loaded { geometry, embedding, infinity_line });
        self.loaded.insert((family, q), loaded.clone());
        Ok(loaded)
    }

    fn embedding(&mut self, family: Family, q: usize) -> Result<SubGeometryEmbedding> {
        self.load(family, q)?
            .embedding
            .clone()
            .ok_or_else(|| Error::input(format!("{} has no subquadrangle", family_name(family))))
    }

    fn pair(&mut self, family: Family, q: usize) -> Result<Arc<DerivedPair>> {
        if let Some(p) = self.pairs.get(&(family, q)) {
            return Ok(p.clone());
        }
        let pair = Arc::new(build_derived_pair(&self.embedding(family, q)?)?);
        self.pairs.insert((family, q), pair.clone());
        Ok(pair)
    }

    /// Runs one check. Errors other than missing inputs become a failing verdict.
    fn check(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<(bool, String)>) -> Result<()> {
        let start = Instant::now();
        let (ok, detail) = match f(self) {
            Ok(r) => r,
            Err(e @ Error::Missing(_)) => return Err(e),
            Err(e) => (false, format!("error: {e}")),
        };
        self.timings.insert(name.to_string(), start.elapsed().as_secs_f64());
        self.checks.push(Check { name: name.to_string(), verdict: ok.into(), detail });
        Ok(())
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Runs a suite and writes its manifest to `<out>/manifest.json`.
pub fn run_suite(name: SuiteName, opts: &SuiteOptions) -> Result<RunManifest> {
    let mut run = Run::new(opts);
    match name {
        SuiteName::LowerQ2 => lower(&mut run, 2)?,
        SuiteName::LowerQ3 => lower(&mut run, 3)?,
        SuiteName::SpgAll => spg_all(&mut run)?,
        SuiteName::Reconstruct => reconstruct(&mut run)?,
        SuiteName::ExtensionGrid => extension_grid(&mut run)?,
        SuiteName::HigherQ2q3 => higher(&mut run)?,
        SuiteName::KkQ9 => kk_q9(&mut run)?,
    }
    let first_failure = run.checks.iter().find(|c| c.verdict == Verdict::Fail).map(|c| c.name.clone());
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        command: format!("suite {}", name.as_str()),
        suite: name,
        parameters: SuiteParameters { seed: opts.seed, budget: opts.budget, no_build: opts.no_build },
        inputs: run.inputs,
        checks: run.checks,
        verdict: first_failure.is_none().into(),
        first_failure,
        timings: run.timings,
    };
    write_json(&opts.out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// A random element of Aut(ℰ), as a product of random generators.
fn random_element(gens: &[Permutation], e: &IncidenceStructure, rng: &mut ChaCha8Rng) -> Permutation {
    let mut p = Permutation::identity(e);
    if gens.is_empty() {
        return p;
    }
    for _ in 0..64 {
        p = p.then(&gens[rng.gen_range(0..gens.len())]);
    }
    p
}

fn cover_check(run: &mut Run, family: Family, q: usize, tag: &str) -> Result<()> {
    run.check(&format!("{tag}/pi-is-a-cover"), |r| {
        let pair = r.pair(family, q)?;
        let ok = pair.pi_certificate.is_some() && pair.census.uniform == Some(2);
        Ok((ok, format!("θ census {:?}, π certified: {}", pair.census.counts, pair.pi_certificate.is_some())))
    })?;
    run.check(&format!("{tag}/factorize-pi-is-identity"), |r| {
        let pair = r.pair(family, q)?;
        let f = factorize_lower(&pair, pair.require_cover()?)?;
        let ok = f.alpha.is_identity() && f.zeta.is_identity();
        Ok((ok, format!("α identity: {}, ζ identity: {}", f.alpha.is_identity(), f.zeta.is_identity())))
    })
}

fn orientation_detail(fs: &[FactorizationResult]) -> (bool, String) {
    let forward = fs.iter().filter(|f| f.orientation == Orientation::Forward).count();
    let uniform = forward == fs.len() || forward == 0;
    (uniform, format!("{forward} forward, {} inverse", fs.len() - forward))
}

/// Above this many covers, the pairwise and extension checks run on a seeded sample.
const EXHAUSTIVE_LIMIT: usize = 1000;
const SAMPLE: usize = 32;

fn lower(run: &mut Run, q: usize) -> Result<()> {
    let fam = Family::Q5q4;
    let tag = format!("q5q4-{q}");
    cover_check(run, fam, q, &tag)?;
    let mut covers: Vec<GeometryMorphism> = Vec::new();
    let mut facts: Vec<FactorizationResult> = Vec::new();
    run.check(&format!("{tag}/covers-equal-aut-e"), |r| {
        let pair = r.pair(fam, q)?;
        covers = enumerate_covers(&pair.a, &pair.e, u64::MAX)?;
        let aut = automorphism_group(&pair.e, r.opts.budget)?;
        Ok((covers.len() as u128 == aut.order(), format!("{} covers, |Aut(E)| = {}", covers.len(), aut.order())))
    })?;
    run.check(&format!("{tag}/every-cover-factorizes"), |r| {
        let pair = r.pair(fam, q)?;
        let pi = pair.require_cover()?;
        let mut alphas = Vec::with_capacity(covers.len());
        for g in &covers {
            let f = factorize_lower(&pair, g)?;
            if !f.alpha.is_automorphism_of(&pair.e) || pi.then_automorphism(&f.alpha) != *g {
                return Ok((false, "a cover is not α ∘ π for its α".into()));
            }
            alphas.push(f.alpha.clone());
            facts.push(f);
        }
        alphas.sort_by(|a, b| a.points.cmp(&b.points).then(a.lines.cmp(&b.lines)));
        alphas.dedup();
        Ok((alphas.len() == covers.len(), format!("{} covers, {} distinct α", covers.len(), alphas.len())))
    })?;
    run.check(&format!("{tag}/zeta-orientation"), |_| Ok(orientation_detail(&facts)))?;

    let mut picked: Vec<usize> = (0..covers.len()).collect();
    if covers.len() > EXHAUSTIVE_LIMIT {
        let mut rng = run.rng(q as u64);
        picked = rand::seq::index::sample(&mut rng, covers.len(), SAMPLE).into_vec();
        picked.sort_unstable();
    }
    let scope = if picked.len() == covers.len() { "all".to_string() } else { format!("{} seeded", picked.len()) };
    run.check(&format!("{tag}/initial-object"), |r| {
        let pair = r.pair(fam, q)?;
        let mut pairs = 0usize;
        for (k, &i) in picked.iter().enumerate() {
            for &j in &picked[k..] {
                let d12 = verify_initial_object(&pair, &covers[i], &covers[j])?;
                let d21 = verify_initial_object(&pair, &covers[j], &covers[i])?;
                if d12.inverse() != d21 {
                    return Ok((false, "δ(γ,γ') is not the inverse of δ(γ',γ)".into()));
                }
                pairs += if i == j { 1 } else { 2 };
            }
        }
        let ok = pairs == picked.len() * picked.len() && !picked.is_empty();
        Ok((ok, format!("{pairs} ordered pairs over {scope} covers, each with a unique δ")))
    })?;
    run.check(&format!("{tag}/sigma-count"), |r| {
        let pair = r.pair(fam, q)?;
        let theta = pair.census.uniform.unwrap_or(0);
        let mut zetas: Vec<&Permutation> = picked.iter().map(|&i| &facts[i].zeta).collect();
        zetas.sort_by(|a, b| a.points.cmp(&b.points));
        zetas.dedup();
        for z in &zetas {
            let rep = extend_automorphism(&pair.embedding, z, ExtensionMode::FindAll, r.opts.budget)?;
            if rep.extensions.len() != theta {
                return Ok((false, format!("an induced ζ has {} extensions, θ = {theta}", rep.extensions.len())));
            }
        }
        Ok((!zetas.is_empty(), format!("{} induced ζ from {scope} covers, each with θ = {theta} extensions", zetas.len())))
    })
}

/// The embeddings whose ℰ is a semipartial geometry, with the expected parameters.
pub const SPG_CASES: [(Family, usize, SPGParameters); 3] = [
    (Family::Q5q4, 2, SPGParameters { s_star: 1, t_star: 4, alpha_star: 2, mu_star: 4 }),
    (Family::Q5q4, 3, SPGParameters { s_star: 2, t_star: 9, alpha_star: 2, mu_star: 12 }),
    (Family::H4h3, 2, SPGParameters { s_star: 3, t_star: 8, alpha_star: 3, mu_star: 18 }),
];

fn spg_all(run: &mut Run) -> Result<()> {
    for (fam, q, want) in SPG_CASES {
        let tag = format!("{}-{q}", family_name(fam));
        run.check(&format!("{tag}/verify-spg"), |r| {
            let pair = r.pair(fam, q)?;
            Ok(match verify_spg(&pair.e, Some(want)) {
                Ok(m) => (true, format!("measured {m}, expected {want}")),
                Err(f) => (false, f.to_string()),
            })
        })?;
        run.check(&format!("{tag}/gate"), |r| {
            let pair = r.pair(fam, q)?;
            let gate = hypothesis_gate(&pair.embedding, &pair.census)?;
            let ok = gate.passes() && gate.predicted() == Some(want);
            Ok((ok, format!("passes: {}, predicted {:?}", gate.passes(), gate.predicted().map(|p| p.to_string()))))
        })?;
        run.check(&format!("{tag}/alpha-witnesses"), |r| {
            let pair = r.pair(fam, q)?;
            let w = alpha_witness_check(&pair)?;
            Ok((w.holds(), format!("{} pairs, {} mismatches", w.pairs_checked, w.mismatches.len())))
        })?;
    }
    for (fam, q) in [(Family::Q5q3, 2), (Family::Q5q3, 3), (Family::Q4q3, 2), (Family::Q4q3, 3)] {
        run.check(&format!("{}-{q}/gate-rejects", family_name(fam)), |r| {
            let emb = r.embedding(fam, q)?;
            let gate = hypothesis_gate(&emb, &theta_census(&emb)?)?;
            Ok((!gate.passes(), format!("θ = {:?}, t' = {}, passes: {}", gate.theta, gate.t_prime, gate.passes())))
        })?;
    }
    Ok(())
}

fn reconstruct(run: &mut Run) -> Result<()> {
    for q in [2, 3] {
        run.check(&format!("q5q4-{q}/chi-is-ambient"), |r| {
            let pair = r.pair(Family::Q5q4, q)?;
            let rec = reconstruct_chi(&pair, &pair.a, pair.require_cover()?)?;
            let iso = find_isomorphism(&rec.chi, pair.ambient(), r.opts.budget)?.is_some();
            Ok((iso, format!("χ of order {:?}, isomorphic to the ambient: {iso}", rec.order)))
        })?;
    }
    run.check("q5q4-2/identify-every-cover", |r| {
        let pair = r.pair(Family::Q5q4, 2)?;
        let covers = enumerate_covers(&pair.a, &pair.e, u64::MAX)?;
        for g in &covers {
            identify_chi_prime(&reconstruct_chi(&pair, &pair.a, g)?, &pair)?;
        }
        Ok((!covers.is_empty(), format!("{} covers identified", covers.len())))
    })?;
    for (fam, q) in [(Family::Q5q4, 2), (Family::H4h3, 2)] {
        run.check(&format!("{}-{q}/condition-c-planarity", family_name(fam)), |r| {
            let pair = r.pair(fam, q)?;
            let inst = condition_c_instances(&pair, 100, r.opts.seed, Reading::Configuration, 1_000_000)?;
            let (mut single, mut multi, mut bad_single, mut bad_multi) = (0, 0, 0, 0);
            for i in &inst {
                let planar = condition_c_planarity(&pair, i)?;
                if i.m_set.len() == 1 {
                    single += 1;
                    bad_single += usize::from(!planar);
                } else {
                    multi += 1;
                    bad_multi += usize::from(planar);
                }
            }
            let ok = bad_single == 0 && bad_multi == 0;
            Ok((ok, format!("|M|=1: {bad_single} of {single} not coplanar; |M|>1: {bad_multi} of {multi} coplanar")))
        })?;
    }
    Ok(())
}

fn extension_grid(run: &mut Run) -> Result<()> {
    run.check("q5q4-2/identity-extensions", |r| {
        let emb = r.embedding(Family::Q5q4, 2)?;
        let id = Permutation::identity(emb.structure());
        let rep = extend_automorphism(&emb, &id, ExtensionMode::FindAll, r.opts.budget)?;
        let ok = rep.extensions.len() == 2 && rep.kernel_order == 2;
        Ok((ok, format!("{} extensions, kernel of order {}", rep.extensions.len(), rep.kernel_order)))
    })?;
    for s in [2usize, 3, 4] {
        run.check(&format!("grid-{s}/aut-order"), |r| {
            let order = automorphism_group(&build_grid(s)?, r.opts.budget)?.order();
            let fact: u128 = (1..=s as u128 + 1).product();
            Ok((order == 2 * fact * fact, format!("|Aut(grid({s}))| = {order}")))
        })?;
        run.check(&format!("q4q3-{s}/grid-generators-extend"), |r| {
            let emb = r.embedding(Family::Q4q3, s)?;
            let group = automorphism_group(emb.structure(), r.opts.budget)?;
            let gens = generator_permutations(&group, emb.structure());
            let mut extending = 0;
            for g in &gens {
                let rep = extend_automorphism(&emb, g, ExtensionMode::FindOne, r.opts.budget)?;
                extending += usize::from(!rep.extensions.is_empty());
            }
            let ok = if s == 4 { extending < gens.len() } else { extending == gens.len() };
            Ok((ok, format!("{extending} of {} generators extend", gens.len())))
        })?;
    }
    Ok(())
}

/// Checks `π ∘ α̃ = γ` point by point and line by line on 𝒜.
pub fn lift_matches(pair: &DerivedPair, lift: &Permutation, gamma: &GeometryMorphism) -> Result<bool> {
    let pi = pair.require_cover()?;
    let line_index: HashMap<usize, usize> = pair.a_lines.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    for (i, &x) in pair.a_points.iter().enumerate() {
        match pair.a_point(lift.points[x]) {
            Some(j) if pi.point_map[j] == gamma.point_map[i] => {}
            _ => return Ok(false),
        }
    }
    for (i, &l) in pair.a_lines.iter().enumerate() {
        match line_index.get(&lift.lines[l]) {
            Some(&j) if pi.line_map[j] == gamma.line_map[i] => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn higher(run: &mut Run) -> Result<()> {
    for q in [2, 3] {
        let tag = format!("q5q4-{q}");
        run.check(&format!("{tag}/higher-decomposition"), |r| {
            let pair = r.pair(Family::Q5q4, q)?;
            let rep = higher_decomposition_check(&pair, r.opts.budget)?;
            Ok((rep.verdict(), format!("{} of {} generators of Aut(E) (order {}) lift", rep.induced, rep.generators, rep.aut_e_order)))
        })?;
        run.check(&format!("{tag}/sampled-lift"), |r| {
            let pair = r.pair(Family::Q5q4, q)?;
            let aut = automorphism_group(&pair.e, r.opts.budget)?;
            let alpha0 = random_element(&generator_permutations(&aut, &pair.e), &pair.e, &mut r.rng(9 + q as u64));
            let gamma = pair.require_cover()?.then_automorphism(&alpha0);
            Ok(match decompose_higher(&pair, &gamma, r.opts.budget)? {
                Some(lift) => {
                    let ok = lift.is_automorphism_of(pair.ambient()) && lift_matches(&pair, &lift, &gamma)?;
                    (ok, format!("α̃ found; π ∘ α̃ = γ elementwise: {ok}"))
                }
                None => (false, "no α̃ with π ∘ α̃ = γ".into()),
            })
        })?;
        run.check(&format!("{tag}/brown"), |r| {
            let pair = r.pair(Family::Q5q4, q)?;
            let b = aut_e_two_ways(&pair, r.opts.budget)?;
            Ok((b.equal, format!("direct {}, stabilizer {}", b.direct_order, b.stabilizer_order)))
        })?;
    }
    Ok(())
}

fn kk_q9(run: &mut Run) -> Result<()> {
    let q = 9;
    run.check("kk-9/census", |r| {
        let loaded = r.load(Family::Kk, q)?;
        let infinity = loaded.infinity_line.ok_or_else(|| Error::input("the cached Kantor-Knuth geometry has no [∞] line"))?;
        let opts = EnumerationOptions {
            checkpoint: Some(r.opts.checkpoint.clone().unwrap_or_else(|| r.opts.out.join("checkpoint"))),
            threads: r.opts.threads,
            closure_budget: None,
        };
        let en = enumerate_subgqs_through_line(&loaded.geometry, infinity, &opts)?;
        let report = census_report(&en.records)?;
        write_json(&r.opts.out.join("kk-census.json"), &report)?;
        let check = report.check(q);
        let mut per: BTreeMap<usize, usize> = BTreeMap::new();
        for &n in &report.one_subtended_per_omega2 {
            *per.entry(n).or_insert(0) += 1;
        }
        let detail = format!("total {}, Ω1 {}, Ω2 {}, one-subtended counts {:?}", report.total, report.omega1, report.omega2, per);
        Ok((en.complete && check.is_ok(), detail))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_build_without_cache_is_missing() {
        let dir = tempfile::tempdir().unwrap();
        let mut opts = SuiteOptions::new(dir.path().join("out"));
        opts.cache = Some(dir.path().join("empty"));
        opts.no_build = true;
        assert!(matches!(run_suite(SuiteName::SpgAll, &opts), Err(Error::Missing(_))));
    }

    #[test]
    fn spg_all_passes_and_reruns_identically() {
        let dir = tempfile::tempdir().unwrap();
        let mut opts = SuiteOptions::new(dir.path().join("out"));
        opts.cache = Some(dir.path().join("cache"));
        let first = run_suite(SuiteName::SpgAll, &opts).unwrap();
        assert_eq!(first.exit_code(), 0, "{:?}", first.checks);
        opts.no_build = true;
        let second = run_suite(SuiteName::SpgAll, &opts).unwrap();
        let strip = |m: &RunManifest| serde_json::to_string(&RunManifest { parameters: SuiteParameters { no_build: false, ..m.parameters.clone() }, ..m.without_timings() }).unwrap();
        assert_eq!(strip(&first), strip(&second));
        assert!(dir.path().join("out").join(MANIFEST_FILE).exists());
    }
}
