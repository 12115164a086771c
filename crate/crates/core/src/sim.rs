//! Runs the caching scheme a PDA describes on real bytes.
//!
//! User `j` caches packet `i` of every file when cell `(i, j)` is a star. For
//! each code `s` the server broadcasts the XOR of packet `(d_j, i)` over all
//! cells `(i, j)` holding `s`. User `j` recovers a missing packet by XOR-ing
//! the signal with the other packets in it, which must be in its cache.
//!
//! Everything here takes a [`Grid`] rather than a [`Pda`] so that broken
//! arrays can be run and their failures observed.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::pda::{Cell, Entry, Grid, Pda};

pub const DEFAULT_PACKET_BYTES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("array has {grid} rows but files have {store} packets")]
    DimensionMismatch { grid: usize, store: usize },
    #[error("demand vector has {found} entries, expected one per user ({expected})")]
    DemandLength { expected: usize, found: usize },
    #[error("user {user} demands file {file}, only {files} files exist")]
    BadDemand { user: usize, file: usize, files: usize },
    #[error("user {user} cannot decode signal {code}: packet {packet} of file {file} is not cached")]
    MissingPacket {
        user: usize,
        code: u32,
        file: usize,
        packet: usize,
    },
    #[error("user {user} has no cached copy of packet {packet} of file {file}")]
    NotCached { user: usize, file: usize, packet: usize },
    #[error("no signal for code {code}")]
    MissingSignal { code: u32 },
    #[error("need at least one file")]
    NoFiles,
}

/// `N` files of `F` equal-size packets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileStore {
    files: usize,
    packets_per_file: usize,
    packet_bytes: usize,
    data: Vec<Vec<u8>>,
}

impl FileStore {
    pub fn random(files: usize, packets_per_file: usize, packet_bytes: usize, seed: u64) -> Self {
        assert!(files >= 1, "need at least one file");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..files * packets_per_file)
            .map(|_| {
                let mut p = vec![0u8; packet_bytes];
                rng.fill(&mut p[..]);
                p
            })
            .collect();
        FileStore {
            files,
            packets_per_file,
            packet_bytes,
            data,
        }
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn packets_per_file(&self) -> usize {
        self.packets_per_file
    }

    pub fn packet_bytes(&self) -> usize {
        self.packet_bytes
    }

    pub fn packet(&self, file: usize, packet: usize) -> &[u8] {
        &self.data[file * self.packets_per_file + packet]
    }

    pub fn file(&self, file: usize) -> Vec<u8> {
        (0..self.packets_per_file)
            .flat_map(|i| self.packet(file, i).iter().copied())
            .collect()
    }
}

/// Packets held by one user, keyed by `(file, packet)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheState {
    pub user: usize,
    pub packets: BTreeMap<(usize, usize), Vec<u8>>,
}

impl CacheState {
    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn get(&self, file: usize, packet: usize) -> Option<&[u8]> {
        self.packets.get(&(file, packet)).map(Vec::as_slice)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signal {
    pub code: u32,
    pub payload: Vec<u8>,
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

fn check_dims(grid: &Grid, store: &FileStore) -> Result<(), SimError> {
    if grid.rows() != store.packets_per_file() {
        return Err(SimError::DimensionMismatch {
            grid: grid.rows(),
            store: store.packets_per_file(),
        });
    }
    Ok(())
}

fn check_demands(grid: &Grid, store: &FileStore, demands: &[usize]) -> Result<(), SimError> {
    if demands.len() != grid.cols() {
        return Err(SimError::DemandLength {
            expected: grid.cols(),
            found: demands.len(),
        });
    }
    match demands.iter().position(|&d| d >= store.files()) {
        Some(user) => Err(SimError::BadDemand {
            user,
            file: demands[user],
            files: store.files(),
        }),
        None => Ok(()),
    }
}

pub fn placement(grid: &Grid, store: &FileStore) -> Result<Vec<CacheState>, SimError> {
    check_dims(grid, store)?;
    Ok((0..grid.cols())
        .map(|user| {
            let mut packets = BTreeMap::new();
            for i in (0..grid.rows()).filter(|&i| grid.get(i, user).is_star()) {
                for n in 0..store.files() {
                    packets.insert((n, i), store.packet(n, i).to_vec());
                }
            }
            CacheState { user, packets }
        })
        .collect())
}

/// One signal per code, in increasing code order.
pub fn delivery(grid: &Grid, store: &FileStore, demands: &[usize]) -> Result<Vec<Signal>, SimError> {
    check_dims(grid, store)?;
    check_demands(grid, store, demands)?;
    Ok(grid
        .occurrences()
        .into_iter()
        .map(|(code, cells)| {
            let mut payload = vec![0u8; store.packet_bytes()];
            for c in cells {
                xor_into(&mut payload, store.packet(demands[c.col], c.row));
            }
            Signal { code, payload }
        })
        .collect())
}

/// Reconstructs the file user `user` asked for.
pub fn decode(
    grid: &Grid,
    user: usize,
    cache: &CacheState,
    signals: &[Signal],
    demands: &[usize],
) -> Result<Vec<u8>, SimError> {
    decode_with(grid, &grid.occurrences(), user, cache, signals, demands)
}

fn decode_with(
    grid: &Grid,
    occ: &BTreeMap<u32, Vec<Cell>>,
    user: usize,
    cache: &CacheState,
    signals: &[Signal],
    demands: &[usize],
) -> Result<Vec<u8>, SimError> {
    let want = demands[user];
    let by_code: BTreeMap<u32, &Signal> = signals.iter().map(|s| (s.code, s)).collect();
    let mut out = Vec::new();
    for i in 0..grid.rows() {
        match grid.get(i, user) {
            Entry::Star => {
                let p = cache.get(want, i).ok_or(SimError::NotCached {
                    user,
                    file: want,
                    packet: i,
                })?;
                out.extend_from_slice(p);
            }
            Entry::Code(code) => {
                let signal = by_code.get(&code).ok_or(SimError::MissingSignal { code })?;
                let mut p = signal.payload.clone();
                for c in occ[&code].iter().filter(|c| (c.row, c.col) != (i, user)) {
                    let file = demands[c.col];
                    let known = cache.get(file, c.row).ok_or(SimError::MissingPacket {
                        user,
                        code,
                        file,
                        packet: c.row,
                    })?;
                    xor_into(&mut p, known);
                }
                out.extend_from_slice(&p);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandMode {
    /// Every one of the `N^K` demand vectors.
    All,
    /// This many i.i.d. uniform demand vectors.
    Sample(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub files: usize,
    pub packet_bytes: usize,
    pub demands: DemandMode,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(files: usize) -> Self {
        SimConfig {
            files,
            packet_bytes: DEFAULT_PACKET_BYTES,
            demands: DemandMode::All,
            seed: 0,
        }
    }

    pub fn packet_bytes(mut self, bytes: usize) -> Self {
        self.packet_bytes = bytes;
        self
    }

    pub fn demands(mut self, mode: DemandMode) -> Self {
        self.demands = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub demands: Vec<usize>,
    pub user: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub k: usize,
    pub f: usize,
    pub z: usize,
    pub s: usize,
    pub files: usize,
    pub packet_bytes: usize,
    pub seed: u64,
    pub demands_run: usize,
    pub decoded: usize,
    pub failed: usize,
    /// Packets per user cache, the same for every user of a valid PDA.
    pub cache_packets: usize,
    /// Largest number of packets sent for one demand vector.
    pub load_packets: usize,
    pub bytes_sent: u64,
    /// Uncoded delivery: every missing packet sent on its own.
    pub baseline_packets: usize,
    /// Earliest failing demand, in enumeration or sampling order.
    pub first_failure: Option<Failure>,
}

impl SimReport {
    pub fn success(&self) -> bool {
        self.failed == 0
    }

    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.load_packets as u64, self.f as u64)
    }

    pub fn memory_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.z as u64, self.f as u64)
    }

    /// Coded over uncoded load.
    pub fn load_ratio(&self) -> Option<Ratio<u64>> {
        (self.baseline_packets > 0).then(|| Ratio::new(self.load_packets as u64, self.baseline_packets as u64))
    }

    /// One `key=value` per line.
    pub fn to_machine(&self) -> String {
        let mut out = format!(
            "params=({},{},{},{})\nfiles={}\npacket_bytes={}\nseed={}\ndemands={}\ndecoded={}\nfailed={}\n\
             cache_packets={}\nload_packets={}\nbytes_sent={}\nbaseline_packets={}\nrate={}\nmemory_ratio={}\n",
            self.k,
            self.f,
            self.z,
            self.s,
            self.files,
            self.packet_bytes,
            self.seed,
            self.demands_run,
            self.decoded,
            self.failed,
            self.cache_packets,
            self.load_packets,
            self.bytes_sent,
            self.baseline_packets,
            self.rate(),
            self.memory_ratio(),
        );
        if let Some(r) = self.load_ratio() {
            out.push_str(&format!("load_ratio={r}\n"));
        }
        if let Some(fail) = &self.first_failure {
            out.push_str(&format!(
                "first_failure_demands={}\nfirst_failure_user={}\nfirst_failure_reason={}\n",
                join(&fail.demands),
                fail.user,
                fail.reason
            ));
        }
        out
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "PDA ({},{},{},{}), N={} files, {} bytes per packet",
            self.k, self.f, self.z, self.s, self.files, self.packet_bytes
        )?;
        writeln!(
            f,
            "decoded {}/{} demand vectors ({} failed)",
            self.decoded, self.demands_run, self.failed
        )?;
        writeln!(
            f,
            "load {} packets per demand (rate {}), uncoded {} packets",
            self.load_packets,
            self.rate(),
            self.baseline_packets
        )?;
        if let Some(r) = self.load_ratio() {
            writeln!(f, "coded/uncoded = {r}")?;
        }
        if let Some(fail) = &self.first_failure {
            writeln!(
                f,
                "first failure: demands ({}) user {}: {}",
                join(&fail.demands),
                fail.user,
                fail.reason
            )?;
        }
        Ok(())
    }
}

fn demand_vectors(k: usize, cfg: &SimConfig) -> Vec<Vec<usize>> {
    match cfg.demands {
        DemandMode::All => {
            let total = (cfg.files as u64)
                .checked_pow(k as u32)
                .filter(|&t| t <= 1 << 24)
                .unwrap_or_else(|| panic!("N^K demand vectors is too many; sample instead"));
            (0..total)
                .map(|mut idx| {
                    // user 0 is the most significant digit
                    let mut d = vec![0; k];
                    for slot in d.iter_mut().rev() {
                        *slot = (idx % cfg.files as u64) as usize;
                        idx /= cfg.files as u64;
                    }
                    d
                })
                .collect()
        }
        DemandMode::Sample(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(1);
            (0..n)
                .map(|_| (0..k).map(|_| rng.gen_range(0..cfg.files)).collect())
                .collect()
        }
    }
}

pub fn simulate(p: &Pda, cfg: &SimConfig) -> Result<SimReport, SimError> {
    simulate_grid(p.grid(), cfg)
}

/// Like [`simulate`] but for any grid. Decoding problems are counted as
/// failures; only malformed inputs are errors.
pub fn simulate_grid(grid: &Grid, cfg: &SimConfig) -> Result<SimReport, SimError> {
    if cfg.files == 0 {
        return Err(SimError::NoFiles);
    }
    let (f, k) = (grid.rows(), grid.cols());
    let store = FileStore::random(cfg.files, f, cfg.packet_bytes, cfg.seed);
    let caches = placement(grid, &store)?;
    let demands = demand_vectors(k, cfg);
    let occ = grid.occurrences();
    let files: Vec<Vec<u8>> = (0..cfg.files).map(|n| store.file(n)).collect();

    let outcomes: Vec<(usize, Option<Failure>)> = demands
        .par_iter()
        .map(|d| {
            let signals = match delivery(grid, &store, d) {
                Ok(s) => s,
                Err(e) => {
                    return (
                        0,
                        Some(Failure {
                            demands: d.clone(),
                            user: 0,
                            reason: e.to_string(),
                        }),
                    )
                }
            };
            let failure = (0..k).find_map(|user| {
                let reason = match decode_with(grid, &occ, user, &caches[user], &signals, d) {
                    Ok(bytes) if bytes == files[d[user]] => return None,
                    Ok(_) => format!("user {user} decoded file {} with wrong bytes", d[user]),
                    Err(e) => e.to_string(),
                };
                Some(Failure {
                    demands: d.clone(),
                    user,
                    reason,
                })
            });
            (signals.len(), failure)
        })
        .collect();

    let failed = outcomes.iter().filter(|o| o.1.is_some()).count();
    let load_packets = outcomes.iter().map(|o| o.0).max().unwrap_or(0);
    let bytes_sent = outcomes.iter().map(|o| (o.0 * cfg.packet_bytes) as u64).sum();
    let stars: Vec<usize> = (0..k).map(|j| grid.column_stars(j)).collect();
    let z = stars.first().copied().unwrap_or(0);
    Ok(SimReport {
        k,
        f,
        z,
        s: grid.codes().len(),
        files: cfg.files,
        packet_bytes: cfg.packet_bytes,
        seed: cfg.seed,
        demands_run: demands.len(),
        decoded: demands.len() - failed,
        failed,
        cache_packets: caches.iter().map(CacheState::len).max().unwrap_or(0),
        load_packets,
        bytes_sent,
        baseline_packets: stars.iter().map(|&z| f - z).sum(),
        first_failure: outcomes.into_iter().find_map(|o| o.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_one() -> Pda {
        crate::constructions::an_pda(4, 2).unwrap()
    }

    #[test]
    fn all_demands_decode() {
        let r = simulate(&example_one(), &SimConfig::new(4)).unwrap();
        assert_eq!(r.demands_run, 256);
        assert!(r.success(), "{r}");
        assert_eq!(r.load_packets, 4);
        assert_eq!(r.baseline_packets, 12);
        assert_eq!(r.load_ratio(), Some(Ratio::new(1, 3)));
        assert_eq!(r.cache_packets, 12);
        assert_eq!(r.bytes_sent, 256 * 4 * 64);
    }

    #[test]
    fn placement_ignores_demands_and_has_zn_packets() {
        let p = example_one();
        let store = FileStore::random(4, 6, 8, 3);
        let a = placement(p.grid(), &store).unwrap();
        assert_eq!(a, placement(p.grid(), &store).unwrap());
        assert!(a.iter().all(|c| c.len() == 3 * 4));
    }

    #[test]
    fn two_user_signal_is_one_xor() {
        let p: Pda = "* 0\n0 *".parse().unwrap();
        let store = FileStore::random(2, 2, 16, 9);
        let sig = delivery(p.grid(), &store, &[0, 1]).unwrap();
        assert_eq!(sig.len(), 1);
        let mut want = store.packet(0, 1).to_vec();
        xor_into(&mut want, store.packet(1, 0));
        assert_eq!(sig[0].payload, want);
    }

    #[test]
    fn single_file_and_empty_delivery() {
        let r = simulate(&example_one(), &SimConfig::new(1)).unwrap();
        assert!(r.success());
        assert_eq!(r.demands_run, 1);
        let all_star: Pda = "* *\n* *".parse().unwrap();
        let r = simulate(&all_star, &SimConfig::new(3)).unwrap();
        assert!(r.success());
        assert_eq!((r.load_packets, r.baseline_packets), (0, 0));
    }

    #[test]
    fn c2b_violation_fails_to_decode() {
        let mut g = example_one().into_grid();
        g.set(0, 0, Entry::Code(3));
        let r = simulate_grid(&g, &SimConfig::new(4)).unwrap();
        assert!(r.failed > 0);
        assert!(r.first_failure.unwrap().reason.contains("not cached"));
    }

    #[test]
    fn input_errors() {
        let p = example_one();
        let store = FileStore::random(2, 5, 8, 0);
        assert!(matches!(
            placement(p.grid(), &store),
            Err(SimError::DimensionMismatch { .. })
        ));
        let store = FileStore::random(2, 6, 8, 0);
        assert!(matches!(
            delivery(p.grid(), &store, &[0, 1, 2, 0]),
            Err(SimError::BadDemand { user: 2, .. })
        ));
        assert!(matches!(
            delivery(p.grid(), &store, &[0]),
            Err(SimError::DemandLength { .. })
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let cfg = SimConfig::new(6).demands(DemandMode::Sample(20)).seed(7);
        let p = crate::constructions::Builtin::P86.pda();
        let a = simulate(&p, &cfg).unwrap();
        assert_eq!(a, simulate(&p, &cfg).unwrap());
        assert_eq!(a.rate(), Ratio::new(5, 8));
    }
}
