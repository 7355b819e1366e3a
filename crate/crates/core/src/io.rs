//! JSON files: geometries, embeddings, morphisms and permutations, derived-pair
//! directories, and report envelopes.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::incidence::{Coordinates, GQOrder, IncidenceStructure};
use crate::subgeometry::{EmbeddingFlags, SubGeometryEmbedding};
use crate::subtension::{build_derived_pair, DerivedPair, ThetaCensus};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub name: String,
    pub points: usize,
    pub lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Fe>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
}

impl GeometryFile {
    pub fn from_structure(g: &IncidenceStructure) -> GeometryFile {
        GeometryFile {
            name: g.name().to_string(),
            points: g.point_count(),
            lines: g.lines().iter().map(|l| l.iter().map(|&p| p as usize).collect()).collect(),
            coords: g.coords().map(|c| c.vectors.clone()),
            field: g.coords().map(|c| c.field),
        }
    }

    pub fn into_structure(self) -> Result<IncidenceStructure> {
        let g = IncidenceStructure::new(self.name, self.points, self.lines)?;
        match (self.coords, self.field) {
            (Some(vectors), Some(field)) => g.with_coordinates(Coordinates { field, vectors }),
            (None, None) => Ok(g),
            _ => Err(Error::input("\"coords\" and \"field\" must be given together")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
    #[serde(default)]
    pub flags: EmbeddingFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_order: Option<GQOrder>,
}

impl EmbeddingFile {
    pub fn from_embedding(e: &SubGeometryEmbedding) -> EmbeddingFile {
        EmbeddingFile { points: e.points().to_vec(), lines: e.lines().to_vec(), flags: e.flags(), sub_order: e.sub_order() }
    }

    /// Rebuilds the embedding; recorded flags must agree with the recomputed ones.
    pub fn into_embedding(self, ambient: Arc<IncidenceStructure>) -> Result<SubGeometryEmbedding> {
        let e = SubGeometryEmbedding::induced(ambient, &self.points, &self.lines)?;
        if self.flags != EmbeddingFlags::default() && self.flags != e.flags() {
            return Err(Error::input(format!("recorded flags {:?} differ from computed {:?}", self.flags, e.flags())));
        }
        Ok(e)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Missing(path.display().to_string()),
        _ => Error::Io(e),
    })?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Pretty JSON with a trailing newline, written through a temporary file.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    crate::kk_census::write_atomic(path, &bytes)
}

pub fn read_geometry(path: &Path) -> Result<IncidenceStructure> {
    read_json::<GeometryFile>(path)?.into_structure()
}

pub fn write_geometry(path: &Path, g: &IncidenceStructure) -> Result<()> {
    write_json(path, &GeometryFile::from_structure(g))
}

pub fn read_embedding(path: &Path, ambient: Arc<IncidenceStructure>) -> Result<SubGeometryEmbedding> {
    read_json::<EmbeddingFile>(path)?.into_embedding(ambient)
}

pub fn write_embedding(path: &Path, e: &SubGeometryEmbedding) -> Result<()> {
    write_json(path, &EmbeddingFile::from_embedding(e))
}

/// File names inside a derived-pair directory.
pub mod pair_files {
    pub const AMBIENT: &str = "ambient.json";
    pub const EMBEDDING: &str = "embedding.json";
    pub const A: &str = "A.json";
    pub const E: &str = "E.json";
    pub const PI: &str = "pi.json";
    pub const CENSUS: &str = "census.json";
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusFile {
    pub schema_version: u32,
    pub census: ThetaCensus,
    pub cover_certified: bool,
}

pub fn write_pair_dir(dir: &Path, pair: &DerivedPair) -> Result<()> {
    use pair_files::*;
    fs::create_dir_all(dir)?;
    write_geometry(&dir.join(AMBIENT), pair.ambient())?;
    write_embedding(&dir.join(EMBEDDING), &pair.embedding)?;
    write_geometry(&dir.join(A), &pair.a)?;
    write_geometry(&dir.join(E), &pair.e)?;
    if let Some(pi) = &pair.pi {
        write_json(&dir.join(PI), pi)?;
    }
    write_json(&dir.join(CENSUS), &CensusFile { schema_version: SCHEMA_VERSION, census: pair.census.clone(), cover_certified: pair.is_cover_certified() })
}

/// Rebuilds the pair from the ambient and embedding files and checks it against the stored 𝒜 and ℰ.
pub fn read_pair_dir(dir: &Path) -> Result<DerivedPair> {
    use pair_files::*;
    let g = Arc::new(read_geometry(&dir.join(AMBIENT))?);
    let emb = read_embedding(&dir.join(EMBEDDING), g)?;
    let pair = build_derived_pair(&emb)?;
    for (file, built) in [(A, &pair.a), (E, &pair.e)] {
        let path = dir.join(file);
        if path.exists() && read_geometry(&path)? != *built {
            return Err(Error::input(format!("{} does not match the geometry rebuilt from the ambient and embedding", path.display())));
        }
    }
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Top-level shape of every JSON report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: String,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Report<T> {
    pub fn new(command: &str, verdict: impl Into<Verdict>, body: T) -> Report<T> {
        Report { schema_version: SCHEMA_VERSION, command: command.to_string(), verdict: verdict.into(), body }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphisms::Permutation;
    use crate::constructions::{build_grid, build_q5_with_q4};
    use crate::covers::GeometryMorphism;

    #[test]
    fn geometry_round_trip_keeps_coordinates() {
        let (g, _) = build_q5_with_q4(2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        write_geometry(&path, &g).unwrap();
        let back = read_geometry(&path).unwrap();
        assert_eq!(back, *g);
        assert_eq!(back.coords(), g.coords());
        assert_eq!(fs::read(&path).unwrap(), {
            write_geometry(&path, &back).unwrap();
            fs::read(&path).unwrap()
        });
    }

    #[test]
    fn coordinates_need_a_field() {
        let f = GeometryFile { name: "x".into(), points: 1, lines: vec![], coords: Some(vec![vec![1]]), field: None };
        assert!(matches!(f.into_structure(), Err(Error::Input(_))));
    }

    #[test]
    fn morphism_and_permutation_share_the_file_shape() {
        let g = build_grid(2).unwrap();
        let p = Permutation::identity(&g);
        let text = serde_json::to_string(&p).unwrap();
        let m: GeometryMorphism = serde_json::from_str(&text).unwrap();
        assert_eq!(m.point_map, p.points);
        assert!(text.starts_with("{\"points\":"));
    }

    #[test]
    fn pair_directory_round_trip() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let pair = build_derived_pair(&emb).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_pair_dir(dir.path(), &pair).unwrap();
        let back = read_pair_dir(dir.path()).unwrap();
        assert_eq!(back.e, pair.e);
        assert_eq!(back.pi, pair.pi);
    }

    #[test]
    fn missing_file_is_reported_as_missing() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_geometry(&dir.path().join("none.json")), Err(Error::Missing(_))));
    }

    #[test]
    fn report_has_top_level_verdict() {
        let r = Report::new("spg-check", true, serde_json::json!({"parameters": [1, 4, 2, 4]}));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["parameters"][1], 4);
    }
}
