use std::io::Write;

use super::Trajectory;

/// Rows `x,y,t,p_x,p_y,time_direction,segment_tag` under a `#` header.
pub fn write_trajectory<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    let b = &traj.barrier;
    writeln!(out, "# tachyon trajectory")?;
    writeln!(out, "# version: {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# e_total: {:e}", traj.e_total)?;
    writeln!(
        out,
        "# barrier: u_max={:e} x_rise={:e} x_plateau_start={:e} x_plateau_end={:e} x_fall={:e}",
        b.u_max, b.x_rise, b.x_plateau_start, b.x_plateau_end, b.x_fall
    )?;
    writeln!(out, "# outcome: {}", traj.outcome.name())?;
    if let Some(x) = traj.turning_x {
        writeln!(out, "# turning_x: {x:e}")?;
    }
    writeln!(out, "# columns: x,y,t,p_x,p_y,time_direction,segment_tag")?;
    for (s, tag) in traj.states.iter().zip(&traj.tags) {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{},{}",
            s.position[0],
            s.position[1],
            s.coord_time,
            s.momentum[0],
            s.momentum[1],
            s.time_direction,
            tag.name()
        )?;
    }
    Ok(())
}
