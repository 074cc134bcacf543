//! Cache contents and requests of every user.

use rand::Rng;

use crate::geometry::Placement;
use crate::popularity::{FileId, PopularityModel};
use crate::{Error, Result};

/// One sampled world: positions, one cached file and one requested file per user,
/// and the collaboration distance.
#[derive(Debug, Clone)]
pub struct NetworkState {
    placement: Placement,
    caches: Vec<FileId>,
    requests: Vec<FileId>,
    r: f64,
    m: usize,
}

impl NetworkState {
    pub fn new(
        placement: Placement,
        caches: Vec<FileId>,
        requests: Vec<FileId>,
        r: f64,
        m: usize,
    ) -> Result<Self> {
        let n = placement.n();
        if caches.len() != n || requests.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} caches and requests, got {} and {}",
                caches.len(),
                requests.len()
            )));
        }
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {r}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameter(
                "library size m must be >= 1".into(),
            ));
        }
        let in_library = |f: &FileId| (1..=m).contains(&f.rank());
        if !caches.iter().chain(&requests).all(in_library) {
            return Err(Error::InvalidParameter(format!(
                "file index outside [1, {m}]"
            )));
        }
        Ok(Self {
            placement,
            caches,
            requests,
            r,
            m,
        })
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn caches(&self) -> &[FileId] {
        &self.caches
    }

    pub fn requests(&self) -> &[FileId] {
        &self.requests
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.placement.n()
    }

    /// True when the user's own cache already holds its request.
    pub fn is_self_served(&self, user: usize) -> bool {
        self.caches[user] == self.requests[user]
    }

    pub fn self_served(&self) -> usize {
        (0..self.n()).filter(|&u| self.is_self_served(u)).count()
    }

    /// Same world with one user removed.
    pub fn without_user(&self, user: usize) -> Result<Self> {
        let mut caches = self.caches.clone();
        let mut requests = self.requests.clone();
        caches.remove(user);
        requests.remove(user);
        Self::new(
            self.placement.without(user)?,
            caches,
            requests,
            self.r,
            self.m,
        )
    }
}

/// `n` i.i.d. draws from a popularity model.
pub fn sample_files<R: Rng + ?Sized>(
    model: &PopularityModel,
    n: usize,
    rng: &mut R,
) -> Vec<FileId> {
    (0..n).map(|_| model.sample_index(rng)).collect()
}

fn check_counts(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "n and m must be >= 1, got n={n} m={m}"
        )));
    }
    Ok(())
}

/// Random distributed caching: each user independently caches a Zipf(`gamma_c`) file.
pub fn assign_caches_zipf<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    gamma_c: f64,
    rng: &mut R,
) -> Result<Vec<FileId>> {
    check_counts(n, m)?;
    let model = PopularityModel::zipf(m, gamma_c)?;
    Ok(sample_files(&model, n, rng))
}

/// Degenerate baseline where every user caches the most popular file.
pub fn assign_caches_most_popular(n: usize, m: usize) -> Result<Vec<FileId>> {
    check_counts(n, m)?;
    Ok(vec![FileId(1); n])
}

/// Independent Zipf(`gamma_r`) requests.
pub fn assign_requests<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    gamma_r: f64,
    rng: &mut R,
) -> Result<Vec<FileId>> {
    check_counts(n, m)?;
    let model = PopularityModel::zipf(m, gamma_r)?;
    Ok(sample_files(&model, n, rng))
}
