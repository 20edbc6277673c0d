//! Single orbits and conjecture scans.

use fences_core::selfdual::{scan_conjecture, Conjecture, ConjectureReport, ScanRange};
use fences_core::{DynamicsMap, Fence, FenceShape, Ideal};

use crate::CliError;

/// The cycle of `map` through `ideal`, starting there.
pub fn orbit(shape: &FenceShape, ideal: &str, map: DynamicsMap) -> Result<Vec<Ideal>, CliError> {
    let fence = Fence::new(shape.clone())?;
    let start: Ideal = ideal.parse()?;
    let start = fence.ideal(start.bits())?;
    let mut cycle = vec![start];
    loop {
        let next = fence.apply(map, *cycle.last().unwrap());
        if next == start {
            return Ok(cycle);
        }
        cycle.push(next);
    }
}

pub fn render_orbit(cycle: &[Ideal]) -> String {
    cycle.iter().map(|i| format!("{i}\n")).collect()
}

pub fn scan_range(conj: Conjecture, max_apt: Option<usize>, t: Option<usize>, max_n: Option<usize>) -> Result<ScanRange, CliError> {
    match (conj, max_apt, t, max_n) {
        (Conjecture::AllCodimensions, None, Some(t), Some(max_n)) => Ok(ScanRange::Segments { t, max_n }),
        (Conjecture::AllCodimensions, ..) => Err(CliError::Usage("c7_2 takes --t and --max-n".into())),
        (_, Some(m), None, None) => Ok(ScanRange::MaxAPlusT(m)),
        _ => Err(CliError::Usage(format!("{conj} takes --max-apt only"))),
    }
}

pub fn scan(conj: Conjecture, range: ScanRange) -> Result<Vec<ConjectureReport>, CliError> {
    Ok(scan_conjecture(conj, range)?)
}

pub fn render_scan(reports: &[ConjectureReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let verdict = if r.holds { "holds" } else { "FAILS" };
        out.push_str(&format!("{} {} {verdict} ({} orbits)\n", r.conjecture, r.fence, r.orbits));
        for s in r.statistics.iter().filter(|s| !s.holds) {
            out.push_str(&format!("    {} target {}", s.statistic, s.target));
            if let Some(w) = &s.witness {
                out.push_str(&format!(" average {} on [{}]", w.average, w.orbit.join(" ")));
            }
            out.push('\n');
        }
        if let Some(c) = &r.codimensions {
            for (codim, count) in c {
                out.push_str(&format!("    codimension {codim}: {count} fences\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_fence_from_empty() {
        let cycle = orbit(&"F(2,2)".parse().unwrap(), "{}", DynamicsMap::Rowmotion).unwrap();
        assert_eq!(render_orbit(&cycle), "{}\n{1,3}\n{1,2,3}\n");
    }

    #[test]
    fn promotion_orbit_through_example() {
        let shape: FenceShape = "F(3,2,2)".parse().unwrap();
        let cycle = orbit(&shape, "{1,2,5}", DynamicsMap::Promotion).unwrap();
        let fence = Fence::new(shape).unwrap();
        assert_eq!(cycle[1], Ideal::from_elements(&[1, 4, 5, 6]));
        assert_eq!(fence.promotion(*cycle.last().unwrap()), cycle[0]);
    }

    #[test]
    fn non_ideals_are_rejected() {
        let err = orbit(&"F(2,2)".parse().unwrap(), "{2}", DynamicsMap::Rowmotion).unwrap_err();
        assert!(matches!(err, CliError::Fence(_)));
    }

    #[test]
    fn range_arguments_are_checked() {
        assert!(scan_range(Conjecture::OppositeShared, Some(8), None, None).is_ok());
        assert!(scan_range(Conjecture::AllCodimensions, Some(8), None, None).is_err());
        assert!(scan_range(Conjecture::IdealCardinality, None, Some(3), Some(9)).is_err());
    }
}
