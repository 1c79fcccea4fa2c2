//! Reduced-resolvent suprema against their closed-form majorants on the hydrogen level set.
use dilres::atom::{gap_from_levels, DEFAULT_MARGIN};
use dilres::spectral::resolvent::{default_q_grid, hydrogen_level_set};
use dilres::spectral::{resolvent_audit, ResolventRegion, Sector};

fn main() -> dilres::Result<()> {
    let levels = hydrogen_level_set(1.0, 30);
    let q = default_q_grid(20);
    for (sector, j) in [(Sector::Ground, 0), (Sector::Excited, 1)] {
        let gap = gap_from_levels(&levels, j, DEFAULT_MARGIN)?;
        let region = ResolventRegion { theta0: 0.7, rho: 0.5 * gap.d() };
        let audit = resolvent_audit(&levels, &gap, sector, &region, 10, 10, &q)?;
        println!(
            "{sector:?}: {} points, all below bound {}, max measured/bound {:.3}",
            audit.points.len(),
            audit.all_pass,
            audit.max_ratio
        );
    }
    Ok(())
}
