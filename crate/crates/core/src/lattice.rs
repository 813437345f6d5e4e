//! Parity (LHZ) encoding of all-to-all Ising problems.
//!
//! Every logical pair `(i, j)` becomes one physical qubit holding the relative
//! orientation `s_i * s_j`. Closed loops of logical spins give 4-body plaquette
//! constraints on a square lattice; the bottom row of 3-body loops is completed
//! with one auxiliary qubit each, pinned to `+1`.
//!
//! Logical spins are indexed from 0 here. Physical qubits are numbered row-major
//! over pairs `(i, j)`, `i < j`, followed by the auxiliaries.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, ViolationKind};

/// Largest physical register the brute-force ground state search will enumerate.
pub const MAX_ENUMERATION_QUBITS: usize = 24;

/// An all-to-all Ising problem `sum_{i<j} J_ij s_i s_j` without local fields.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalProblem {
    n_logical: usize,
    couplings: BTreeMap<(usize, usize), f64>,
}

impl LogicalProblem {
    pub fn new(n_logical: usize, couplings: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        if n_logical < 3 {
            return Err(Error::DegenerateSize(n_logical));
        }
        for &(i, j) in couplings.keys() {
            if i >= j {
                return Err(Error::InvalidProblem(format!(
                    "pair ({i}, {j}) is not ordered i < j"
                )));
            }
            if j >= n_logical {
                return Err(Error::InvalidProblem(format!(
                    "pair ({i}, {j}) out of range for {n_logical} spins"
                )));
            }
        }
        Ok(Self { n_logical, couplings })
    }

    /// Same coupling on every pair.
    pub fn uniform(n_logical: usize, coupling: f64) -> Result<Self> {
        let mut couplings = BTreeMap::new();
        for i in 0..n_logical {
            for j in (i + 1)..n_logical {
                couplings.insert((i, j), coupling);
            }
        }
        Self::new(n_logical, couplings)
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.couplings.get(&key).copied()
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    /// Logical energy of a spin configuration. Missing couplings count as zero.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        self.couplings
            .iter()
            .map(|(&(i, j), &c)| c * f64::from(spins[i]) * f64::from(spins[j]))
            .sum()
    }
}

/// Qubit, pair and constraint geometry of the parity encoding for `N` logical spins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhzLayout {
    n_logical: usize,
    qubit_pairs: Vec<(usize, usize)>,
    aux_indices: Vec<usize>,
    constraints: Vec<[usize; 4]>,
    incident: Vec<Vec<usize>>,
}

impl LhzLayout {
    pub fn new(n_logical: usize) -> Result<Self> {
        if n_logical < 3 {
            return Err(Error::DegenerateSize(n_logical));
        }
        let n = n_logical;
        let qubit_pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let n_pairs = qubit_pairs.len();
        let aux_indices: Vec<usize> = (n_pairs..n_pairs + n - 2).collect();
        let pair = |i: usize, j: usize| pair_index(n, i, j);

        let mut constraints = Vec::with_capacity((n - 1) * (n - 2) / 2);
        for i in 0..n {
            for j in (i + 2)..n.saturating_sub(1) {
                constraints.push([pair(i, j), pair(i, j + 1), pair(i + 1, j + 1), pair(i + 1, j)]);
            }
        }
        for (i, &aux) in aux_indices.iter().enumerate() {
            constraints.push([pair(i, i + 1), pair(i, i + 2), pair(i + 1, i + 2), aux]);
        }

        let mut incident = vec![Vec::new(); n_pairs + aux_indices.len()];
        for (l, quad) in constraints.iter().enumerate() {
            for &q in quad {
                incident[q].push(l);
            }
        }

        Ok(Self { n_logical, qubit_pairs, aux_indices, constraints, incident })
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    /// `N_p = N(N+1)/2 - 2`
    pub fn n_physical(&self) -> usize {
        self.qubit_pairs.len() + self.aux_indices.len()
    }

    /// `N_c = N_p - 2N + 3`
    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// `N_a = N - 2`
    pub fn n_aux(&self) -> usize {
        self.aux_indices.len()
    }

    pub fn qubit_pairs(&self) -> &[(usize, usize)] {
        &self.qubit_pairs
    }

    pub fn aux_indices(&self) -> &[usize] {
        &self.aux_indices
    }

    pub fn is_aux(&self, k: usize) -> bool {
        k >= self.qubit_pairs.len() && k < self.n_physical()
    }

    /// Plaquettes as `(north, west, south, east)` physical indices.
    pub fn constraints(&self) -> &[[usize; 4]] {
        &self.constraints
    }

    /// Constraints that contain qubit `k`.
    pub fn constraints_of(&self, k: usize) -> &[usize] {
        &self.incident[k]
    }

    /// Physical index of logical pair `(i, j)` in either order.
    pub fn pair_qubit(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        (a != b && b < self.n_logical).then(|| pair_index(self.n_logical, a, b))
    }

    /// Encode logical spins; auxiliaries are `+1`.
    pub fn encode_logical(&self, spins: &[i8]) -> Result<Vec<i8>> {
        if spins.len() != self.n_logical {
            return Err(Error::Shape { expected: self.n_logical, got: spins.len() });
        }
        check_spins(spins)?;
        let mut out: Vec<i8> = self.qubit_pairs.iter().map(|&(i, j)| spins[i] * spins[j]).collect();
        out.resize(self.n_physical(), 1);
        Ok(out)
    }

    /// Invert [`encode_logical`](Self::encode_logical), returning the representative with
    /// the first logical spin up.
    pub fn decode_physical(&self, config: &[i8]) -> Result<Vec<i8>> {
        if config.len() != self.n_physical() {
            return Err(Error::Shape { expected: self.n_physical(), got: config.len() });
        }
        check_spins(config)?;
        let mut spins = vec![1i8; self.n_logical];
        for (j, spin) in spins.iter_mut().enumerate().skip(1) {
            *spin = config[pair_index(self.n_logical, 0, j)];
        }
        for (k, &(i, j)) in self.qubit_pairs.iter().enumerate() {
            if config[k] != spins[i] * spins[j] {
                return Err(Error::ConstraintViolation { kind: ViolationKind::Pair, index: k });
            }
        }
        for (l, quad) in self.constraints.iter().enumerate() {
            if plaquette(config, quad) != 1 {
                return Err(Error::ConstraintViolation { kind: ViolationKind::Plaquette, index: l });
            }
        }
        Ok(spins)
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn plaquette(config: &[i8], quad: &[usize; 4]) -> i8 {
    quad.iter().map(|&q| config[q]).product()
}

fn check_spins(values: &[i8]) -> Result<()> {
    match values.iter().position(|&s| s != 1 && s != -1) {
        Some(index) => Err(Error::NotASpin { index, value: values[index] }),
        None => Ok(()),
    }
}

/// Field strengths of one compiled problem.
///
/// All schedules start at `h = h_start`, `J = 0`, `C = 0` and end at `h = 0`,
/// `J = j_final`, `C = c_final`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalInstance {
    layout: LhzLayout,
    h_start: Vec<f64>,
    j_final: Vec<f64>,
    c_final: Vec<f64>,
    tau: f64,
    seed: Option<u64>,
}

impl PhysicalInstance {
    pub fn new(
        layout: LhzLayout,
        h_start: Vec<f64>,
        j_final: Vec<f64>,
        c_final: Vec<f64>,
        tau: f64,
    ) -> Result<Self> {
        let np = layout.n_physical();
        for (name, len, want) in [
            ("h_start", h_start.len(), np),
            ("j_final", j_final.len(), np),
            ("c_final", c_final.len(), layout.n_constraints()),
        ] {
            if len != want {
                return Err(Error::InvalidInstance(format!(
                    "{name} has length {len}, layout needs {want}"
                )));
            }
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInstance(format!("tau must be positive, got {tau}")));
        }
        if let Some(c) = c_final.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidInstance(format!("constraint strengths must be positive, got {c}")));
        }
        if h_start.iter().chain(&j_final).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite field strength".into()));
        }
        Ok(Self { layout, h_start, j_final, c_final, tau, seed: None })
    }

    /// Map a logical problem onto the layout. Auxiliaries get `J = -|aux_pin|`.
    pub fn compile(problem: &LogicalProblem, h0: f64, c: f64, aux_pin: f64, tau: f64) -> Result<Self> {
        let layout = LhzLayout::new(problem.n_logical())?;
        let mut j_final = Vec::with_capacity(layout.n_physical());
        for &(i, j) in layout.qubit_pairs() {
            j_final.push(problem.coupling(i, j).ok_or(Error::IncompleteProblem(i, j))?);
        }
        j_final.resize(layout.n_physical(), -aux_pin.abs());
        let np = layout.n_physical();
        let nc = layout.n_constraints();
        Self::new(layout, vec![h0; np], j_final, vec![c; nc], tau)
    }

    /// Random instance with `J_k` i.i.d. uniform on `[-1, 1]` for every non-auxiliary qubit.
    pub fn random(n_logical: usize, seed: u64, h0: f64, c: f64, aux_pin: f64, tau: f64) -> Result<Self> {
        let layout = LhzLayout::new(n_logical)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut j_final: Vec<f64> = (0..layout.qubit_pairs().len())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        j_final.resize(layout.n_physical(), -aux_pin.abs());
        let np = layout.n_physical();
        let nc = layout.n_constraints();
        let mut instance = Self::new(layout, vec![h0; np], j_final, vec![c; nc], tau)?;
        instance.seed = Some(seed);
        Ok(instance)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let mut out = Self::new(
            self.layout.clone(),
            self.h_start.clone(),
            self.j_final.clone(),
            self.c_final.clone(),
            tau,
        )?;
        out.seed = self.seed;
        Ok(out)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn layout(&self) -> &LhzLayout {
        &self.layout
    }

    pub fn n_physical(&self) -> usize {
        self.layout.n_physical()
    }

    pub fn h_start(&self) -> &[f64] {
        &self.h_start
    }

    pub fn j_final(&self) -> &[f64] {
        &self.j_final
    }

    pub fn c_final(&self) -> &[f64] {
        &self.c_final
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Classical energy `sum_k J_k z_k - sum_l C_l z_n z_w z_s z_e` of the final Hamiltonian.
    pub fn classical_energy(&self, z: &[i8]) -> f64 {
        let fields: f64 = self.j_final.iter().zip(z).map(|(j, &s)| j * f64::from(s)).sum();
        let plaquettes: f64 = self
            .layout
            .constraints()
            .iter()
            .zip(&self.c_final)
            .map(|(quad, c)| c * f64::from(plaquette(z, quad)))
            .sum();
        fields - plaquettes
    }
}

/// Ground energy and all minimizing configurations of the final classical Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGround {
    pub energy: f64,
    pub configs: Vec<Vec<i8>>,
}

/// Exhaustive search over all `2^N_p` configurations.
///
/// Bit `N_p - 1 - k` of the enumeration index is qubit `k` (qubit 0 most significant);
/// a zero bit is `z = +1`.
pub fn brute_force_ground(instance: &PhysicalInstance) -> Result<ClassicalGround> {
    let np = instance.n_physical();
    if np > MAX_ENUMERATION_QUBITS {
        return Err(Error::ResourceLimit { what: "ground state enumeration", size: np, limit: MAX_ENUMERATION_QUBITS });
    }
    let energies: Vec<f64> = (0..1usize << np)
        .map(|b| instance.classical_energy(&basis_spins(b, np)))
        .collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * e_min.abs().max(1.0);
    let configs = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e - e_min <= tol)
        .map(|(b, _)| basis_spins(b, np))
        .collect();
    Ok(ClassicalGround { energy: e_min, configs })
}

/// Spin values of computational basis state `index` on `n` qubits.
pub fn basis_spins(index: usize, n: usize) -> Vec<i8> {
    (0..n).map(|k| if (index >> (n - 1 - k)) & 1 == 0 { 1 } else { -1 }).collect()
}

/// Inverse of [`basis_spins`].
pub fn basis_index(spins: &[i8]) -> usize {
    let n = spins.len();
    spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .fold(0, |acc, (k, _)| acc | 1 << (n - 1 - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_sizes() {
        let l4 = LhzLayout::new(4).unwrap();
        assert_eq!((l4.n_physical(), l4.n_constraints(), l4.n_aux()), (8, 3, 2));
        let l3 = LhzLayout::new(3).unwrap();
        assert_eq!((l3.n_physical(), l3.n_constraints(), l3.n_aux()), (4, 1, 1));
        assert!(matches!(LhzLayout::new(2), Err(Error::DegenerateSize(2))));
    }

    #[test]
    fn counting_identities() {
        for n in 3..=8 {
            let l = LhzLayout::new(n).unwrap();
            let np = n * (n + 1) / 2 - 2;
            assert_eq!(l.n_physical(), np);
            assert_eq!(l.n_constraints(), np + 3 - 2 * n);
            assert_eq!(l.n_aux(), n - 2);
            for quad in l.constraints() {
                let mut q = quad.to_vec();
                q.sort_unstable();
                q.dedup();
                assert_eq!(q.len(), 4);
                assert!(q.iter().all(|&k| k < np));
            }
        }
    }

    #[test]
    fn n3_layout_order() {
        let l = LhzLayout::new(3).unwrap();
        assert_eq!(l.qubit_pairs(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(l.aux_indices(), &[3]);
        assert_eq!(l.constraints(), &[[0, 1, 2, 3]]);
    }

    #[test]
    fn compile_uniform_n3() {
        let p = LogicalProblem::uniform(3, 1.0).unwrap();
        let inst = PhysicalInstance::compile(&p, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert_eq!(inst.j_final(), &[1.0, 1.0, 1.0, -10.0]);
        assert_eq!(inst.c_final(), &[2.0]);
        assert_eq!(inst.h_start(), &[1.0; 4]);
    }

    #[test]
    fn compile_n4_aux_pins() {
        let p = LogicalProblem::uniform(4, 0.3).unwrap();
        let inst = PhysicalInstance::compile(&p, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert_eq!(&inst.j_final()[..6], &[0.3; 6]);
        assert_eq!(&inst.j_final()[6..], &[-10.0, -10.0]);
    }

    #[test]
    fn compile_missing_pair() {
        let mut c = BTreeMap::new();
        c.insert((0, 1), 1.0);
        c.insert((0, 2), 1.0);
        let p = LogicalProblem::new(3, c).unwrap();
        assert!(matches!(
            PhysicalInstance::compile(&p, 1.0, 2.0, 10.0, 1.0),
            Err(Error::IncompleteProblem(1, 2))
        ));
    }

    #[test]
    fn zero_problem_ground_satisfies_constraints() {
        let p = LogicalProblem::uniform(4, 0.0).unwrap();
        let inst = PhysicalInstance::compile(&p, 1.0, 2.0, 10.0, 1.0).unwrap();
        let ground = brute_force_ground(&inst).unwrap();
        // 2^N logical configurations modulo global flip
        assert_eq!(ground.configs.len(), 8);
        for z in &ground.configs {
            for quad in inst.layout().constraints() {
                assert_eq!(plaquette(z, quad), 1);
            }
            for &a in inst.layout().aux_indices() {
                assert_eq!(z[a], 1);
            }
        }
    }

    #[test]
    fn random_is_deterministic() {
        let a = PhysicalInstance::random(4, 17, 1.0, 2.0, 10.0, 1.0).unwrap();
        let b = PhysicalInstance::random(4, 17, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert_eq!(a, b);
        let c = PhysicalInstance::random(4, 18, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert_ne!(a.j_final(), c.j_final());
    }

    #[test]
    fn random_n3_shape() {
        let inst = PhysicalInstance::random(3, 5, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert_eq!(inst.j_final().len(), 4);
        assert!(inst.j_final()[..3].iter().all(|j| (-1.0..=1.0).contains(j)));
        assert_eq!(inst.j_final()[3], -10.0);
    }

    #[test]
    fn random_mean_near_zero() {
        let values: Vec<f64> = (0..100)
            .flat_map(|s| PhysicalInstance::random(4, s, 1.0, 2.0, 10.0, 1.0).unwrap().j_final()[..6].to_vec())
            .collect();
        assert!(values.iter().all(|j| (-1.0..=1.0).contains(j)));
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn encode_examples() {
        let l = LhzLayout::new(4).unwrap();
        assert_eq!(l.encode_logical(&[1, 1, 1, 1]).unwrap(), vec![1; 8]);
        let s = [1, -1, -1, 1];
        let flipped: Vec<i8> = s.iter().map(|x| -x).collect();
        assert_eq!(l.encode_logical(&s).unwrap(), l.encode_logical(&flipped).unwrap());

        let l3 = LhzLayout::new(3).unwrap();
        let z = l3.encode_logical(&[1, -1, 1]).unwrap();
        assert_eq!(z, vec![-1, 1, -1, 1]);
        assert_eq!(plaquette(&z, &l3.constraints()[0]), 1);
        assert!(matches!(l3.encode_logical(&[1, 1]), Err(Error::Shape { expected: 3, got: 2 })));
    }

    #[test]
    fn decode_examples() {
        let l = LhzLayout::new(4).unwrap();
        assert_eq!(l.decode_physical(&[1; 8]).unwrap(), vec![1; 4]);
        let z = l.encode_logical(&[-1, 1, -1, 1]).unwrap();
        assert_eq!(l.decode_physical(&z).unwrap(), vec![1, -1, 1, -1]);
        for k in 0..8 {
            let mut bad = z.clone();
            bad[k] = -bad[k];
            assert!(matches!(l.decode_physical(&bad), Err(Error::ConstraintViolation { .. })), "flip {k}");
        }
    }

    #[test]
    fn decode_reports_flipped_aux_as_plaquette() {
        let l = LhzLayout::new(3).unwrap();
        let err = l.decode_physical(&[1, 1, 1, -1]).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation { kind: ViolationKind::Plaquette, index: 0 }));
    }

    #[test]
    fn antiferromagnetic_n3_matches_logical_enumeration() {
        let p = LogicalProblem::uniform(3, -1.0).unwrap();
        let inst = PhysicalInstance::compile(&p, 1.0, 2.0, 10.0, 1.0).unwrap();
        let ground = brute_force_ground(&inst).unwrap();
        let logical_min = (0..8usize)
            .map(|b| p.energy(&basis_spins(b, 3)))
            .fold(f64::INFINITY, f64::min);
        for z in &ground.configs {
            let s = inst.layout().decode_physical(z).unwrap();
            assert_eq!(p.energy(&s), logical_min);
        }
    }

    #[test]
    fn basis_index_roundtrip() {
        for b in 0..64 {
            assert_eq!(basis_index(&basis_spins(b, 6)), b);
        }
        assert_eq!(basis_spins(1, 3), vec![1, 1, -1]);
    }

    #[test]
    fn enumeration_bound() {
        let l = LhzLayout::new(7).unwrap();
        assert_eq!(l.n_physical(), 26);
        let np = l.n_physical();
        let nc = l.n_constraints();
        let inst = PhysicalInstance::new(l, vec![1.0; np], vec![0.0; np], vec![2.0; nc], 1.0).unwrap();
        assert!(matches!(brute_force_ground(&inst), Err(Error::ResourceLimit { .. })));
    }
}
