//! Random-field Ising model instances: per-edge couplings, per-node
//! fields, classical energy evaluation, and a versioned JSON file format.

use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{rng_from_seed, Graph};

pub const SCHEMA_VERSION: u32 = 1;

/// How an instance was produced, kept for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params", rename_all = "snake_case")]
pub enum GeneratorModel {
    ErdosRenyi { p_edge: f64 },
    WattsStrogatz { k: usize, p_rewire: f64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    #[serde(flatten)]
    pub model: GeneratorModel,
    pub graph_seed: u64,
    pub field_seed: u64,
}

/// An RFIM problem: graph, per-edge couplings J (default all +1),
/// per-node fields h drawn uniformly from [-field_range, field_range].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfimInstance {
    pub graph: Graph,
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
    pub field_range: f64,
    pub generator: GeneratorInfo,
}

impl RfimInstance {
    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.fields.len() != self.graph.n {
            return Err(Error::Schema(format!(
                "{} fields for {} nodes",
                self.fields.len(),
                self.graph.n
            )));
        }
        if self.couplings.len() != self.graph.edges.len() {
            return Err(Error::Schema(format!(
                "{} couplings for {} edges",
                self.couplings.len(),
                self.graph.edges.len()
            )));
        }
        if self.field_range <= 0.0 {
            return Err(Error::Schema(format!(
                "field_range {} must be positive",
                self.field_range
            )));
        }
        for &h in &self.fields {
            if h.abs() > self.field_range {
                return Err(Error::Schema(format!(
                    "field {h} outside [-{0}, {0}]",
                    self.field_range
                )));
            }
        }
        Ok(())
    }

    /// FNV-1a over the serialized instance; used as a stable instance id.
    pub fn content_hash(&self) -> u64 {
        let text = serde_json::to_string(&InstanceFile::from(self)).expect("serializable");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// A classical spin assignment. Bit 0 maps to spin +1, bit 1 to spin -1;
/// character i of the bitstring is site i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    bits: Vec<u8>,
}

impl SpinConfig {
    pub fn from_bits(bits: &str) -> Result<Self> {
        let mut v = Vec::with_capacity(bits.len());
        for c in bits.chars() {
            match c {
                '0' => v.push(0),
                '1' => v.push(1),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bitstring character '{c}' is not 0/1"
                    )))
                }
            }
        }
        Ok(SpinConfig { bits: v })
    }

    /// Site i takes bit i of the basis-state index (qubit 0 = LSB).
    pub fn from_index(x: usize, n: usize) -> Self {
        SpinConfig {
            bits: (0..n).map(|j| ((x >> j) & 1) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> String {
        self.bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }

    pub fn spins(&self) -> Vec<i8> {
        self.bits.iter().map(|b| if *b == 0 { 1 } else { -1 }).collect()
    }
}

/// Classical RFIM energy: -sum_E J_uv s_u s_v - sum_i h_i s_i.
pub fn classical_energy(instance: &RfimInstance, config: &SpinConfig) -> Result<f64> {
    if config.len() != instance.n() {
        return Err(Error::InvalidInput(format!(
            "configuration length {} does not match n = {}",
            config.len(),
            instance.n()
        )));
    }
    let spins = config.spins();
    Ok(energy_of_spins(instance, &spins))
}

pub(crate) fn energy_of_spins(instance: &RfimInstance, spins: &[i8]) -> f64 {
    let mut e = 0.0;
    for (idx, &(u, v)) in instance.graph.edges.iter().enumerate() {
        e -= instance.couplings[idx] * f64::from(spins[u] * spins[v]);
    }
    for (i, &h) in instance.fields.iter().enumerate() {
        e -= h * f64::from(spins[i]);
    }
    e
}

/// Classical energy evaluated straight from a basis-state index, avoiding
/// the string round-trip. Used by the brute-force oracle.
pub(crate) fn energy_of_index(instance: &RfimInstance, x: usize) -> f64 {
    let spin = |j: usize| if (x >> j) & 1 == 0 { 1.0 } else { -1.0 };
    let mut e = 0.0;
    for (idx, &(u, v)) in instance.graph.edges.iter().enumerate() {
        e -= instance.couplings[idx] * spin(u) * spin(v);
    }
    for (i, &h) in instance.fields.iter().enumerate() {
        e -= h * spin(i);
    }
    e
}

/// Draws i.i.d. uniform fields on [-field_range, field_range] and attaches
/// unit ferromagnetic couplings.
pub fn assign_fields(graph: Graph, field_range: f64, seed: u64) -> Result<RfimInstance> {
    assign_fields_with_generator(
        graph,
        field_range,
        seed,
        GeneratorModel::Custom,
        0,
    )
}

pub fn assign_fields_with_generator(
    graph: Graph,
    field_range: f64,
    field_seed: u64,
    model: GeneratorModel,
    graph_seed: u64,
) -> Result<RfimInstance> {
    if !(field_range > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "field_range {field_range} must be positive"
        )));
    }
    graph.validate()?;
    let mut rng = rng_from_seed(field_seed);
    let dist = Uniform::new_inclusive(-field_range, field_range);
    let fields: Vec<f64> = (0..graph.n).map(|_| dist.sample(&mut rng)).collect();
    let couplings = vec![1.0; graph.edges.len()];
    let instance = RfimInstance {
        graph,
        couplings,
        fields,
        field_range,
        generator: GeneratorInfo {
            model,
            graph_seed,
            field_seed,
        },
    };
    instance.validate()?;
    Ok(instance)
}

/// On-disk shape; `schema_version` gates loading.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema_version: u32,
    n: usize,
    edges: Vec<(usize, usize)>,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    field_range: f64,
    generator: GeneratorInfo,
}

impl From<&RfimInstance> for InstanceFile {
    fn from(i: &RfimInstance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            n: i.graph.n,
            edges: i.graph.edges.clone(),
            couplings: i.couplings.clone(),
            fields: i.fields.clone(),
            field_range: i.field_range,
            generator: i.generator.clone(),
        }
    }
}

pub fn save_instance(instance: &RfimInstance, path: &Path) -> Result<()> {
    instance.validate()?;
    let file = InstanceFile::from(instance);
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Schema(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<RfimInstance> {
    let text = std::fs::read_to_string(path)?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "schema_version {} unsupported (expected {})",
            file.schema_version, SCHEMA_VERSION
        )));
    }
    let instance = RfimInstance {
        graph: Graph {
            n: file.n,
            edges: file.edges,
        },
        couplings: file.couplings,
        fields: file.fields,
        field_range: file.field_range,
        generator: file.generator,
    };
    instance.validate()?;
    Ok(instance)
}

/// Two-node, one-edge instance used all over the unit tests.
#[cfg(test)]
pub(crate) fn single_edge_instance(h0: f64, h1: f64, range: f64) -> RfimInstance {
    RfimInstance {
        graph: Graph::new(2, vec![(0, 1)]).unwrap(),
        couplings: vec![1.0],
        fields: vec![h0, h1],
        field_range: range,
        generator: GeneratorInfo {
            model: GeneratorModel::Custom,
            graph_seed: 0,
            field_seed: 0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_erdos_renyi;

    #[test]
    fn fields_within_range() {
        let g = gen_erdos_renyi(12, 0.5, 3).unwrap();
        let inst = assign_fields(g, 5.0, 11).unwrap();
        assert_eq!(inst.fields.len(), 12);
        assert!(inst.fields.iter().all(|h| h.abs() <= 5.0));

        let g = gen_erdos_renyi(7, 0.8, 3).unwrap();
        let inst = assign_fields(g, 1.0, 11).unwrap();
        assert!(inst.fields.iter().all(|h| h.abs() <= 1.0));
    }

    #[test]
    fn fields_deterministic() {
        let g = gen_erdos_renyi(9, 0.5, 3).unwrap();
        let a = assign_fields(g.clone(), 3.0, 99).unwrap();
        let b = assign_fields(g, 3.0, 99).unwrap();
        assert_eq!(a.fields, b.fields);
    }

    #[test]
    fn assign_fields_rejects_bad_range() {
        let g = gen_erdos_renyi(4, 0.5, 3).unwrap();
        assert!(assign_fields(g, 0.0, 0).is_err());
    }

    #[test]
    fn classical_energy_single_edge() {
        let inst = single_edge_instance(0.0, 0.0, 1.0);
        let e00 = classical_energy(&inst, &SpinConfig::from_bits("00").unwrap()).unwrap();
        let e01 = classical_energy(&inst, &SpinConfig::from_bits("01").unwrap()).unwrap();
        assert_eq!(e00, -1.0);
        assert_eq!(e01, 1.0);
    }

    #[test]
    fn classical_energy_with_fields() {
        // Hand enumeration for J=1, h=(2, -0.5):
        //   "00": -1 - 2 + 0.5 = -2.5    "01": +1 - 2 - 0.5 = -1.5
        //   "10": +1 + 2 + 0.5 =  3.5    "11": -1 + 2 - 0.5 =  0.5
        let inst = single_edge_instance(2.0, -0.5, 3.0);
        let e = |b: &str| classical_energy(&inst, &SpinConfig::from_bits(b).unwrap()).unwrap();
        assert_eq!(e("00"), -2.5);
        assert_eq!(e("01"), -1.5);
        assert_eq!(e("10"), 3.5);
        assert_eq!(e("11"), 0.5);
    }

    #[test]
    fn classical_energy_rejects_length_mismatch() {
        let inst = single_edge_instance(0.0, 0.0, 1.0);
        assert!(classical_energy(&inst, &SpinConfig::from_bits("000").unwrap()).is_err());
    }

    #[test]
    fn global_flip_symmetry() {
        // Zero fields: energy invariant under global spin flip.
        let g = gen_erdos_renyi(6, 0.7, 5).unwrap();
        let mut inst = assign_fields(g, 1.0, 5).unwrap();
        inst.fields = vec![0.0; 6];
        for x in 0..(1usize << 6) {
            let a = classical_energy(&inst, &SpinConfig::from_index(x, 6)).unwrap();
            let b = classical_energy(&inst, &SpinConfig::from_index(!x & 0x3f, 6)).unwrap();
            assert_eq!(a, b);
        }
        // Zero couplings: field term negates under global flip.
        let mut inst = assign_fields(gen_erdos_renyi(6, 0.7, 5).unwrap(), 2.0, 6).unwrap();
        inst.couplings = vec![0.0; inst.graph.edges.len()];
        for x in 0..(1usize << 6) {
            let a = classical_energy(&inst, &SpinConfig::from_index(x, 6)).unwrap();
            let b = classical_energy(&inst, &SpinConfig::from_index(!x & 0x3f, 6)).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn save_load_round_trip() {
        let g = gen_erdos_renyi(7, 0.8, 42).unwrap();
        let inst = assign_fields_with_generator(
            g,
            3.0,
            17,
            GeneratorModel::ErdosRenyi { p_edge: 0.8 },
            42,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let dup = dir.path().join("dup.json");
        std::fs::write(
            &dup,
            r#"{"schema_version":1,"n":3,"edges":[[0,1],[0,1]],"couplings":[1.0,1.0],
               "fields":[0.1,0.2,0.3],"field_range":1.0,
               "generator":{"model":"custom","graph_seed":0,"field_seed":0}}"#,
        )
        .unwrap();
        assert!(load_instance(&dup).is_err());

        let missing = dir.path().join("missing.json");
        std::fs::write(
            &missing,
            r#"{"schema_version":1,"n":3,"edges":[[0,1]],"couplings":[1.0],
               "field_range":1.0,
               "generator":{"model":"custom","graph_seed":0,"field_seed":0}}"#,
        )
        .unwrap();
        assert!(load_instance(&missing).is_err());

        let wrong_version = dir.path().join("ver.json");
        std::fs::write(
            &wrong_version,
            r#"{"schema_version":9,"n":3,"edges":[[0,1]],"couplings":[1.0],
               "fields":[0.1,0.2,0.3],"field_range":1.0,
               "generator":{"model":"custom","graph_seed":0,"field_seed":0}}"#,
        )
        .unwrap();
        assert!(load_instance(&wrong_version).is_err());
    }
}
