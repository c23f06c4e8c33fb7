//! Fixed-width text view of a schedule: one row per action, one column per
//! time unit, `#` while the action runs. Rows sort by (release, id) so the
//! picture reads top-left to bottom-right.

use crate::parallel::{check_execution, Execution, ExecutionViolation, ParallelPlan};

pub fn render_schedule(pp: &ParallelPlan, exec: &Execution) -> Result<String, ExecutionViolation> {
    let makespan = check_execution(pp, exec)?;
    let mut rows: Vec<(u32, &str, u32)> = pp
        .plan
        .ids()
        .map(|id| {
            let release = exec.release[id];
            (release, id.as_str(), pp.plan.get(id).expect("listed id").duration)
        })
        .collect();
    rows.sort();
    let id_width = rows.iter().map(|(_, id, _)| id.len()).max().unwrap_or(0);

    let mut out = String::new();
    for (release, id, duration) in rows {
        let bar: String = (0..makespan)
            .map(|t| {
                let t = t as u32;
                if t >= release && (t - release) < duration {
                    '#'
                } else {
                    '.'
                }
            })
            .collect();
        out.push_str(&format!("{id:<id_width$} {bar}\n"));
    }
    out.push_str(&format!("makespan={makespan}\n"));
    Ok(out)
}
