//! Standard Kummer torsors attached to a Kummer chart `u: P -> Q`.
//!
//! The torsor is a torsor under the diagonalizable group `D(Q^gp / u(P^gp))`;
//! only the finite abelian group `Q^gp / u(P^gp)` is kept, together with the
//! rank of the underlying finite cover.

use std::fmt;

use serde::Serialize;

use crate::error::MonoidError;
use crate::monoid::{
    integrality_certificate_free_base, kummer_report, IntegralityCertificate, MonoidMorphism,
};
use crate::{FiniteAbelianGroup, Int};

#[derive(Clone, Debug, Serialize)]
pub struct StandardTorsor {
    pub chart: MonoidMorphism,
    /// `Q^gp / u(P^gp)`, whose Cartier dual is the structure group.
    pub structure_group: FiniteAbelianGroup,
    /// Degree of the cover: the index `[Q^gp : u(P^gp)]`.
    #[serde(serialize_with = "crate::json::ser_int")]
    pub rank: Int,
    /// Set when the chart is free and an integrality certificate was found,
    /// so the underlying scheme is finite locally free over the base.
    pub locally_free: bool,
    pub certificate: Option<IntegralityCertificate>,
}

/// Validates that `u` is Kummer and computes the torsor invariants. A
/// non-Kummer chart is rejected with the first failed sub-criterion.
pub fn build_standard_torsor(u: &MonoidMorphism) -> Result<StandardTorsor, MonoidError> {
    let report = kummer_report(u)?;
    if let Some(why) = report.failed_criterion() {
        return Err(MonoidError::NotKummer(why));
    }
    let structure_group = report.cokernel_torsion;
    let rank = structure_group.order();
    let free_source = u.source().generators().len() == u.source().gp_rank();
    let certificate = if free_source {
        Some(integrality_certificate_free_base(u)?)
    } else {
        None
    };
    Ok(StandardTorsor {
        chart: u.clone(),
        structure_group,
        rank,
        locally_free: certificate.is_some(),
        certificate,
    })
}

/// `Some(n)` when the structure group is cyclic of order `n`, i.e. the torsor
/// is a `mu_n`-torsor.
pub fn torsor_group_is_mu_n(t: &StandardTorsor) -> Option<Int> {
    t.structure_group
        .is_cyclic()
        .then(|| t.structure_group.order())
}

impl fmt::Display for StandardTorsor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "torsor under D({}) of rank {}{}",
            self.structure_group,
            self.rank,
            if self.locally_free {
                ", finite locally free"
            } else {
                ""
            }
        )
    }
}
