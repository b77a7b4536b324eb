//! Coordinate Bethe ansatz over the two reference states |0…0⟩ (vacuum) and
//! |2…2⟩ (plump), checked against exact diagonalization of the periodic chain.

use crate::model_catalog::{build_chain, HamiltonianParams, ModelError};
use crate::tensor_core::{eig_sym_sector, pow3, site_sum, ComplexMatrix, SectorProjector, TensorError, C64, ONE};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum CbaError {
    #[error("M = {m} is outside 0..={max}")]
    SectorOutOfRange { m: usize, max: usize },
    #[error("roots were built on the {0:?} reference")]
    WrongReference(Reference),
    #[error("scattering function singular at roots ({n}, {j})")]
    Singular { n: usize, j: usize },
    #[error("no tabulated S value for (k_n, k_j) = ({0}, {1})")]
    NotTabulated(C64, C64),
    #[error("spectral sets differ in size: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("completeness probe supports L = 2, 3 (got {0})")]
    ProbeLength(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Vacuum,
    Plump,
}

impl Reference {
    fn background(self) -> usize {
        match self {
            Reference::Vacuum => 0,
            Reference::Plump => 2,
        }
    }
}

/// One elementary state: excitation (or hole) positions, 1-based and
/// non-decreasing, with a doubled position meaning m_k = 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElemState {
    pub positions: Vec<usize>,
    pub pattern: Vec<u8>,
    /// Index of the state in the 3^L product basis (first site most significant).
    pub index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorBasis {
    pub l: usize,
    /// Total S^z of the sector, whatever the reference.
    pub m: usize,
    pub reference: Reference,
    pub states: Vec<ElemState>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Elementary states of the S^z = M sector. On the plump reference each site
/// carries 2 − label holes, N = 2L − M in total.
pub fn sector_basis(l: usize, m: usize, reference: Reference) -> Result<SectorBasis, CbaError> {
    if m > 2 * l {
        return Err(CbaError::SectorOutOfRange { m, max: 2 * l });
    }
    let bg = reference.background();
    let mut states: Vec<ElemState> = (0..pow3(l))
        .filter(|&s| site_sum(s, l) == m)
        .map(|index| {
            let mut positions = Vec::new();
            let mut pattern = Vec::new();
            for x in 1..=l {
                let label = index / pow3(l - x) % 3;
                let n = label.abs_diff(bg);
                if n > 0 {
                    pattern.push(n as u8);
                    positions.extend(std::iter::repeat_n(x, n));
                }
            }
            ElemState { positions, pattern, index }
        })
        .collect();
    states.sort_by(|a, b| a.positions.cmp(&b.positions));
    Ok(SectorBasis { l, m, reference, states })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRoots {
    pub k: Vec<C64>,
    pub reference: Reference,
}

fn check_reference(roots: &BetheRoots, want: Reference) -> Result<(), CbaError> {
    if roots.reference == want {
        Ok(())
    } else {
        Err(CbaError::WrongReference(roots.reference))
    }
}

/// E_M = L v₀₀ + M(v₀₁ + v₁₀ − 2v₀₀) + Σ (q e^{ik} + p e^{−ik}).
pub fn energy_vacuum(params: &HamiltonianParams, l: usize, roots: &BetheRoots) -> Result<C64, CbaError> {
    check_reference(roots, Reference::Vacuum)?;
    let v = &params.v;
    let m = roots.k.len() as f64;
    let hop: C64 = roots.k.iter().map(|&k| params.q * (C64::i() * k).exp() + params.p * (-C64::i() * k).exp()).sum();
    Ok(v[0][0] * l as f64 + (v[0][1] + v[1][0] - 2.0 * v[0][0]) * m + hop)
}

/// Ẽ_N = L v₂₂ + N(v₂₁ + v₁₂ − 2v₂₂) + Σ (t₃ e^{ik} + s₃ e^{−ik}), summed over the N roots.
pub fn energy_plump(params: &HamiltonianParams, l: usize, roots: &BetheRoots) -> Result<C64, CbaError> {
    check_reference(roots, Reference::Plump)?;
    let v = &params.v;
    let n = roots.k.len() as f64;
    let hop: C64 = roots.k.iter().map(|&k| params.t3 * (C64::i() * k).exp() + params.s3 * (-C64::i() * k).exp()).sum();
    Ok(v[2][2] * l as f64 + (v[2][1] + v[1][2] - 2.0 * v[2][2]) * n + hop)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSample {
    pub k_n: C64,
    pub k_j: C64,
    pub s: C64,
}

/// Two-body scattering amplitude S(k_n, k_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Scattering {
    Trivial,
    Constant { c: C64 },
    Table { samples: Vec<ScatteringSample> },
}

/// Tabulated momenta match within this distance.
pub const TABLE_MATCH: f64 = 1e-9;

impl Scattering {
    pub fn eval(&self, k_n: C64, k_j: C64) -> Result<C64, CbaError> {
        match self {
            Scattering::Trivial => Ok(ONE),
            Scattering::Constant { c } => Ok(*c),
            Scattering::Table { samples } => samples
                .iter()
                .find(|s| (s.k_n - k_n).norm() < TABLE_MATCH && (s.k_j - k_j).norm() < TABLE_MATCH)
                .map(|s| s.s)
                .ok_or(CbaError::NotTabulated(k_n, k_j)),
        }
    }
}

/// |e^{i k_j L} − Π_{n≠j} S(k_n, k_j)| for every root.
pub fn bethe_residual(roots: &BetheRoots, s: &Scattering, l: usize) -> Result<Vec<f64>, CbaError> {
    bethe_residual_with(roots, l, |kn, kj| s.eval(kn, kj))
}

pub fn bethe_residual_with<F>(roots: &BetheRoots, l: usize, s: F) -> Result<Vec<f64>, CbaError>
where
    F: Fn(C64, C64) -> Result<C64, CbaError>,
{
    let k = &roots.k;
    (0..k.len())
        .map(|j| {
            let mut prod = ONE;
            for n in (0..k.len()).filter(|&n| n != j) {
                let v = s(k[n], k[j])?;
                if !v.is_finite() {
                    return Err(CbaError::Singular { n, j });
                }
                prod *= v;
            }
            Ok(((C64::i() * k[j] * l as f64).exp() - prod).norm())
        })
        .collect()
}

/// k = 2πm/L, m = 0..L−1: the one-particle solutions.
pub fn solve_free_momenta(l: usize, reference: Reference) -> Vec<BetheRoots> {
    (0..l).map(|m| BetheRoots { k: vec![C64::new(2.0 * PI * m as f64 / l as f64, 0.0)], reference }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralMatch {
    pub size: usize,
    pub max_distance: f64,
    pub tol: f64,
    pub pass: bool,
    /// Number of eigenvalue clusters; clusters are groups closer than 10·tol.
    pub clusters: usize,
    /// Clusters whose two sides have different cardinality.
    pub unbalanced: Vec<C64>,
}

/// Multiset comparison: values are grouped into clusters (closer than
/// 10·tol), each cluster must hold as many entries of each list, and the
/// distance is the widest cross pair inside a cluster.
pub fn spectral_set_compare(e: &[C64], et: &[C64], tol: f64) -> Result<SpectralMatch, CbaError> {
    if e.len() != et.len() {
        return Err(CbaError::SizeMismatch(e.len(), et.len()));
    }
    let all: Vec<(C64, bool)> = e.iter().map(|&x| (x, false)).chain(et.iter().map(|&x| (x, true))).collect();
    let n = all.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (all[i].0 - all[j].0).norm() <= 10.0 * tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut max_distance = 0.0f64;
    let mut unbalanced = Vec::new();
    for members in groups.values() {
        let (left, right): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&i| !all[i].1);
        if left.len() != right.len() {
            unbalanced.push(all[members[0]].0);
            max_distance = f64::INFINITY;
            continue;
        }
        for &i in &left {
            for &j in &right {
                max_distance = max_distance.max((all[i].0 - all[j].0).norm());
            }
        }
    }
    Ok(SpectralMatch {
        size: e.len(),
        max_distance,
        tol,
        pass: max_distance <= tol,
        clusters: groups.len(),
        unbalanced,
    })
}

/// Eigenvalues of the S^z = M block of the periodic chain.
pub fn sector_spectrum(h2: &ComplexMatrix, l: usize, m: usize) -> Result<Vec<C64>, CbaError> {
    let chain = build_chain(h2, l, true)?;
    Ok(eig_sym_sector(&chain, &SectorProjector::spin(l, m))?)
}

/// All 2L + 1 sector spectra, diagonalized in parallel.
pub fn chain_spectra(h2: &ComplexMatrix, l: usize) -> Result<Vec<Vec<C64>>, CbaError> {
    let chain = build_chain(h2, l, true)?;
    (0..=2 * l)
        .into_par_iter()
        .map(|m| Ok(eig_sym_sector(&chain, &SectorProjector::spin(l, m))?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    VacuumReference,
    VacuumOneParticle,
    PlumpReference,
    PlumpOneParticle,
    /// Needs M ≥ 2 roots on either reference; no S-matrix is available here.
    Uncovered,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorCoverage {
    pub m: usize,
    pub dim: usize,
    pub coverage: Vec<Coverage>,
    pub reached: usize,
    pub unreached: Vec<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub l: usize,
    pub tol: f64,
    pub sectors: Vec<SectorCoverage>,
    pub levels: usize,
    pub reached: usize,
    /// Levels not produced by the reference-state formulas available here.
    /// This is a count, not a completeness claim.
    pub flagged: usize,
}

/// Which exact levels of each sector the zero- and one-particle formulas on
/// both references reproduce (greedy matching within `tol`).
pub fn completeness_probe(h2: &ComplexMatrix, l: usize, tol: f64) -> Result<CompletenessReport, CbaError> {
    if !(2..=3).contains(&l) {
        return Err(CbaError::ProbeLength(l));
    }
    let params = HamiltonianParams::from_matrix(h2)?;
    let spectra = chain_spectra(h2, l)?;
    let mut sectors = Vec::new();
    for (m, exact) in spectra.into_iter().enumerate() {
        let mut predicted = Vec::new();
        let mut coverage = Vec::new();
        let mut add = |roots: Vec<BetheRoots>, cov: Coverage, f: &dyn Fn(&BetheRoots) -> Result<C64, CbaError>| {
            coverage.push(cov);
            for r in &roots {
                predicted.push(f(r));
            }
        };
        let vac = |r: &BetheRoots| energy_vacuum(&params, l, r);
        let plu = |r: &BetheRoots| energy_plump(&params, l, r);
        if m == 0 {
            add(vec![BetheRoots { k: vec![], reference: Reference::Vacuum }], Coverage::VacuumReference, &vac);
        }
        if m == 1 {
            add(solve_free_momenta(l, Reference::Vacuum), Coverage::VacuumOneParticle, &vac);
        }
        if m == 2 * l {
            add(vec![BetheRoots { k: vec![], reference: Reference::Plump }], Coverage::PlumpReference, &plu);
        }
        if m == 2 * l - 1 {
            add(solve_free_momenta(l, Reference::Plump), Coverage::PlumpOneParticle, &plu);
        }
        if coverage.is_empty() {
            coverage.push(Coverage::Uncovered);
        }
        let mut predicted: Vec<Option<C64>> = predicted.into_iter().map(|p| p.ok()).collect();
        let mut unreached = Vec::new();
        for &e in &exact {
            let hit = predicted.iter_mut().find(|p| p.is_some_and(|p| (p - e).norm() <= tol * e.norm().max(1.0)));
            match hit {
                Some(slot) => *slot = None,
                None => unreached.push(e),
            }
        }
        sectors.push(SectorCoverage { m, dim: exact.len(), coverage, reached: exact.len() - unreached.len(), unreached });
    }
    let levels = sectors.iter().map(|s| s.dim).sum();
    let reached = sectors.iter().map(|s| s.reached).sum();
    Ok(CompletenessReport { l, tol, sectors, levels, reached, flagged: levels - reached })
}
