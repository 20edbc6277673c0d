//! Dimension sweeps and the summary table.

use fences_core::spaces::{space_dims, SpaceReport};
use fences_core::{Fence, FenceShape, IdealIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::CliError;

pub const DIMS_OP: &str = "dims";

/// Shapes with `t` segments (all counts when `None`) and at most `max_n`
/// elements.
pub fn sweep_shapes(t: Option<usize>, max_n: usize) -> Vec<FenceShape> {
    match t {
        Some(t) => FenceShape::all_with_segments(t, max_n),
        None => FenceShape::all_up_to(max_n),
    }
}

pub fn fence_dims(shape: &FenceShape, verify_bases: bool) -> Result<SpaceReport, CliError> {
    let fence = Fence::new(shape.clone())?;
    Ok(space_dims(&IdealIndex::new(&fence), verify_bases))
}

/// One report per shape, in input order. Cached reports are reused and new
/// ones are appended to the cache.
pub fn sweep_dims(shapes: &[FenceShape], cache: Option<&mut Cache>) -> Result<Vec<SpaceReport>, CliError> {
    let cached: Vec<Option<SpaceReport>> = shapes
        .iter()
        .map(|s| cache.as_deref().and_then(|c| c.get(&s.to_string(), DIMS_OP)))
        .collect();
    let reports = shapes
        .par_iter()
        .zip(cached)
        .map(|(s, hit)| match hit {
            Some(r) => Ok((r, false)),
            None => fence_dims(s, false).map(|r| (r, true)),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if let Some(c) = cache {
        let fresh: Vec<(String, &SpaceReport)> =
            reports.iter().filter(|(_, new)| *new).map(|(r, _)| (r.fence.clone(), r)).collect();
        c.put_all(DIMS_OP, &fresh)?;
    }
    Ok(reports.into_iter().map(|(r, _)| r).collect())
}

/// Counts over a sweep, in the layout of the summary table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub fences: usize,
    pub single_orbit: usize,
    pub ih_equals_it: usize,
}

impl TableRow {
    pub fn new(fences: usize, single_orbit: usize, ih_equals_it: usize) -> Self {
        TableRow {
            fences,
            single_orbit,
            ih_equals_it,
        }
    }
}

pub fn table_row(reports: &[SpaceReport]) -> TableRow {
    TableRow {
        fences: reports.len(),
        single_orbit: reports.iter().filter(|r| r.single_orbit()).count(),
        ih_equals_it: reports.iter().filter(|r| r.ih_equals_it()).count(),
    }
}

pub const CSV_HEADER: &str = "fence,n,t,ideals,orbits,dim_it,dim_at,dim_ih,dim_ah,single_orbit,ih_equals_it";

pub fn to_csv(reports: &[SpaceReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{},{},{},{},{},{}\n",
            r.fence,
            r.n,
            r.t,
            r.ideals,
            r.orbits,
            r.dim_it,
            r.dim_at,
            r.dim_ih,
            r.dim_ah,
            r.single_orbit(),
            r.ih_equals_it()
        ));
    }
    out
}
