//! MDS coded cache placement.
//!
//! Every file is cut into `d` plain subfiles which are combined into `K` coded
//! subfiles with a `d x K` Vandermonde generator over GF(p). EN `i` caches the
//! `i`-th coded subfile of every file, so each EN stores a `1/d` fraction of the
//! library, and any `d` coded subfiles of a file from distinct ENs recover it.
//!
//! Bytes are packed two per symbol, big-endian. The symbol stream of a file is
//! zero-padded to a multiple of `d` and plain subfile `j` is the `j`-th
//! contiguous chunk of it.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementScheme {
    topology: Topology,
    field: PrimeField,
    /// Evaluation point of each EN, `alphas[i - 1]` for EN `i`.
    alphas: Vec<u64>,
}

impl PlacementScheme {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Generator column of EN `en`: `(a^0, a^1, ..., a^(d-1))`.
    pub fn column(&self, en: usize) -> Result<Vec<u64>> {
        let k = self.topology.k();
        if en == 0 || en > k {
            return Err(Error::IndexOutOfRange { index: en, k });
        }
        let a = self.alphas[en - 1];
        Ok((0..self.topology.d() as u64).map(|e| self.field.pow(a, e)).collect())
    }

    /// The full generator as `d` rows of `K` entries.
    pub fn generator(&self) -> Vec<Vec<u64>> {
        let d = self.topology.d();
        (0..d)
            .map(|row| {
                self.alphas
                    .iter()
                    .map(|&a| self.field.pow(a, row as u64))
                    .collect()
            })
            .collect()
    }
}

/// Builds the Vandermonde placement with evaluation points `1, 2, ..., K`.
pub fn build_placement(topology: &Topology, field: PrimeField) -> Result<PlacementScheme> {
    let k = topology.k() as u64;
    if field.modulus() <= k {
        return Err(Error::Field {
            p: field.modulus(),
            reason: format!("need p > K = {k} distinct nonzero evaluation points"),
        });
    }
    Ok(PlacementScheme {
        topology: *topology,
        field,
        alphas: (1..=k).collect(),
    })
}

/// The file library. File ids are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    files: Vec<Vec<u8>>,
}

impl Library {
    pub fn new(files: Vec<Vec<u8>>) -> Result<Self> {
        let Some(first) = files.first() else {
            return Err(Error::Library("library must hold at least one file".into()));
        };
        let len = first.len();
        if let Some(pos) = files.iter().position(|f| f.len() != len) {
            return Err(Error::Library(format!(
                "file {} has {} bytes, expected {len}",
                pos + 1,
                files[pos].len()
            )));
        }
        Ok(Library { files })
    }

    pub fn n_files(&self) -> usize {
        self.files.len()
    }

    pub fn file_bytes(&self) -> usize {
        self.files[0].len()
    }

    pub fn file(&self, file_id: usize) -> Result<&[u8]> {
        file_id
            .checked_sub(1)
            .and_then(|i| self.files.get(i))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Library(format!("no file with id {file_id}")))
    }
}

/// One coded subfile cached at one EN.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedSubfile {
    pub file_id: usize,
    pub en: usize,
    /// Length of the original file, restored after decoding.
    pub byte_len: usize,
    pub payload: Vec<u64>,
}

/// Cache contents keyed by `(EN, file id)`.
pub type CacheContents = BTreeMap<(usize, usize), CodedSubfile>;

/// Requested file per user; `demands[j - 1]` is what user `j` asks for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector {
    demands: Vec<usize>,
}

impl DemandVector {
    pub fn new(demands: Vec<usize>, n_files: usize) -> Result<Self> {
        if let Some(bad) = demands.iter().find(|&&f| f == 0 || f > n_files) {
            return Err(Error::Demand(format!("file {bad} not in 1..={n_files}")));
        }
        Ok(DemandVector { demands })
    }

    /// User `j` asks for file `((j - 1) mod N) + 1`.
    pub fn canonical(k: usize, n_files: usize) -> Result<Self> {
        if n_files == 0 {
            return Err(Error::Demand("library is empty".into()));
        }
        Ok(DemandVector { demands: (0..k).map(|j| j % n_files + 1).collect() })
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    /// File requested by (1-based) user `user`.
    pub fn of(&self, user: usize) -> usize {
        self.demands[user - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.demands
    }
}

/// Number of symbols in each plain (and coded) subfile of a file of `byte_len`.
pub fn subfile_symbols(byte_len: usize, d: usize) -> usize {
    byte_len.div_ceil(2).div_ceil(d)
}

fn to_symbols(bytes: &[u8], d: usize) -> Vec<u64> {
    let mut symbols: Vec<u64> = bytes
        .chunks(2)
        .map(|c| (u64::from(c[0]) << 8) | u64::from(*c.get(1).unwrap_or(&0)))
        .collect();
    symbols.resize(subfile_symbols(bytes.len(), d) * d, 0);
    symbols
}

fn to_bytes(symbols: &[u64], byte_len: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(symbols.len() * 2);
    for &s in symbols {
        if s > 0xffff {
            return Err(Error::Decode(format!("symbol {s} does not fit in 16 bits")));
        }
        out.extend_from_slice(&(s as u16).to_be_bytes());
    }
    if out[byte_len..].iter().any(|&b| b != 0) {
        return Err(Error::Decode("nonzero padding".into()));
    }
    out.truncate(byte_len);
    Ok(out)
}

/// Encodes every file of the library and returns what each EN caches.
pub fn encode(scheme: &PlacementScheme, library: &Library) -> Result<CacheContents> {
    let f = scheme.field;
    if f.modulus() <= 0xffff {
        return Err(Error::Field {
            p: f.modulus(),
            reason: "byte payloads need p > 65535 to hold 16-bit symbols".into(),
        });
    }
    let d = scheme.topology.d();
    let k = scheme.topology.k();
    let columns: Vec<Vec<u64>> = (1..=k).map(|en| scheme.column(en)).collect::<Result<_>>()?;
    let mut cache = CacheContents::new();
    for (idx, bytes) in library.files.iter().enumerate() {
        let symbols = to_symbols(bytes, d);
        let len = symbols.len() / d;
        for (en, col) in (1..=k).zip(&columns) {
            let payload = (0..len)
                .map(|s| {
                    (0..d).fold(0, |acc, j| f.add(acc, f.mul(col[j], symbols[j * len + s])))
                })
                .collect();
            cache.insert(
                (en, idx + 1),
                CodedSubfile { file_id: idx + 1, en, byte_len: bytes.len(), payload },
            );
        }
    }
    Ok(cache)
}

/// Recovers a file from exactly `d` of its coded subfiles held by distinct ENs.
pub fn decode(scheme: &PlacementScheme, file_id: usize, parts: &[CodedSubfile]) -> Result<Vec<u8>> {
    let d = scheme.topology.d();
    if parts.len() != d {
        return Err(Error::Decode(format!("need exactly {d} coded subfiles, got {}", parts.len())));
    }
    let mut seen = BTreeSet::new();
    for p in parts {
        if p.file_id != file_id {
            return Err(Error::Decode(format!(
                "coded subfile from EN {} belongs to file {}, not {file_id}",
                p.en, p.file_id
            )));
        }
        if !seen.insert(p.en) {
            return Err(Error::Decode(format!("duplicate coded subfile from EN {}", p.en)));
        }
    }
    let len = parts[0].payload.len();
    let byte_len = parts[0].byte_len;
    if parts.iter().any(|p| p.payload.len() != len || p.byte_len != byte_len) {
        return Err(Error::Decode("coded subfiles disagree in length".into()));
    }
    if len != subfile_symbols(byte_len, d) {
        return Err(Error::Decode(format!("payload of {len} symbols cannot hold {byte_len} bytes")));
    }

    // Row r of the system is the generator column of the r-th part.
    let system: Vec<Vec<u64>> = parts.iter().map(|p| scheme.column(p.en)).collect::<Result<_>>()?;
    let f = scheme.field;
    let inverse = f
        .invert(&system)
        .ok_or_else(|| Error::Decode("singular decoding system: MDS invariant violated".into()))?;

    let mut symbols = vec![0u64; len * d];
    for s in 0..len {
        for j in 0..d {
            symbols[j * len + s] = (0..d).fold(0, |acc, r| f.add(acc, f.mul(inverse[j][r], parts[r].payload[s])));
        }
    }
    to_bytes(&symbols, byte_len)
}

/// Rank over GF(p) of the generator columns of `en_set`.
pub fn decodability_rank(scheme: &PlacementScheme, en_set: &BTreeSet<usize>) -> Result<usize> {
    let rows: Vec<Vec<u64>> = en_set.iter().map(|&en| scheme.column(en)).collect::<Result<_>>()?;
    Ok(scheme.field.rank(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(k: usize, d: usize) -> PlacementScheme {
        build_placement(&Topology::new(k, d).unwrap(), PrimeField::default()).unwrap()
    }

    #[test]
    fn field_must_exceed_k() {
        let t = Topology::new(8, 2).unwrap();
        assert!(build_placement(&t, PrimeField::new(7).unwrap()).is_err());
        assert!(build_placement(&t, PrimeField::new(11).unwrap()).is_ok());
    }

    #[test]
    fn degree_one_is_identity() {
        let s = scheme(5, 1);
        assert_eq!(s.generator(), vec![vec![1; 5]]);
        let lib = Library::new(vec![b"hello".to_vec(), b"world".to_vec()]).unwrap();
        let cache = encode(&s, &lib).unwrap();
        for en in 1..=5 {
            let part = &cache[&(en, 2)];
            assert_eq!(decode(&s, 2, std::slice::from_ref(part)).unwrap(), b"world");
        }
    }

    #[test]
    fn subfile_length() {
        let s = scheme(8, 2);
        let lib = Library::new(vec![vec![1, 2, 3, 4, 5, 6, 7, 8]]).unwrap();
        let cache = encode(&s, &lib).unwrap();
        assert_eq!(cache.len(), 8);
        assert!(cache.values().all(|c| c.payload.len() == 2));
    }

    #[test]
    fn odd_lengths_are_padded_and_restored() {
        let s = scheme(11, 4);
        for n in [0usize, 1, 3, 7, 9, 17] {
            let data: Vec<u8> = (0..n as u8).map(|b| b.wrapping_mul(37) | 1).collect();
            let lib = Library::new(vec![data.clone()]).unwrap();
            let cache = encode(&s, &lib).unwrap();
            let parts: Vec<_> = [3, 4, 8, 11].iter().map(|&en| cache[&(en, 1)].clone()).collect();
            assert_eq!(decode(&s, 1, &parts).unwrap(), data);
        }
    }

    #[test]
    fn decode_rejects_bad_inputs() {
        let s = scheme(8, 2);
        let lib = Library::new(vec![vec![9; 10], vec![3; 10]]).unwrap();
        let cache = encode(&s, &lib).unwrap();
        let a = cache[&(1, 1)].clone();
        let dup = decode(&s, 1, &[a.clone(), a.clone()]);
        assert!(matches!(dup, Err(Error::Decode(m)) if m.contains("duplicate")));
        let mixed = decode(&s, 1, &[a.clone(), cache[&(2, 2)].clone()]);
        assert!(matches!(mixed, Err(Error::Decode(m)) if m.contains("belongs to file")));
        assert!(decode(&s, 1, &[a]).is_err());
    }

    #[test]
    fn library_and_demand_validation() {
        assert!(Library::new(vec![]).is_err());
        assert!(Library::new(vec![vec![1, 2], vec![1]]).is_err());
        assert!(DemandVector::new(vec![1, 2, 3], 2).is_err());
        assert!(DemandVector::new(vec![0], 2).is_err());
        assert_eq!(DemandVector::canonical(5, 2).unwrap().as_slice(), &[1, 2, 1, 2, 1]);
    }

    #[test]
    fn encode_needs_sixteen_bit_field() {
        let t = Topology::new(5, 3).unwrap();
        let s = build_placement(&t, PrimeField::new(7).unwrap()).unwrap();
        let lib = Library::new(vec![vec![0; 4]]).unwrap();
        assert!(encode(&s, &lib).is_err());
    }

    #[test]
    fn rank_of_small_sets() {
        let s = scheme(11, 4);
        assert_eq!(decodability_rank(&s, &BTreeSet::new()).unwrap(), 0);
        assert_eq!(decodability_rank(&s, &BTreeSet::from([7])).unwrap(), 1);
        assert_eq!(decodability_rank(&s, &BTreeSet::from([1, 2, 3, 4, 5, 6])).unwrap(), 4);
    }

    #[test]
    fn storage_is_one_over_d() {
        let s = scheme(11, 4);
        let lib = Library::new(vec![vec![7; 64]; 3]).unwrap();
        let cache = encode(&s, &lib).unwrap();
        for en in 1..=11 {
            let held: usize = cache.iter().filter(|((e, _), _)| *e == en).map(|(_, c)| c.payload.len()).sum();
            // 3 files of 32 symbols each, a quarter of each
            assert_eq!(held, 3 * 32 / 4);
        }
    }
}
