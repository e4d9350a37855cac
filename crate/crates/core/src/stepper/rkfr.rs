use super::{Crash, Solver};
use crate::kernels::FaceSide;
use crate::mesh::StateField;

impl Solver {
    /// One step of the reference scheme: every stage residual is the full
    /// FR residual, so traces are exchanged once per stage.
    pub fn rkfr_step(&mut self, state: &mut StateField, dt: f64) -> Result<(), Crash> {
        self.check_ready();
        self.scratch.un.copy_from_slice(&state.data);
        let s = self.disc.tableau.stages();
        let c = self.disc.tableau.c().to_vec();
        for i in 0..s {
            {
                let disc = &self.disc;
                let sc = &mut self.scratch;
                disc.stage_state(&sc.un, &sc.residuals, i, dt, &mut sc.stages[i]);
                if i > 0 {
                    disc.check_field(&sc.stages[i], state.t, Some(i))?;
                }
                disc.volume_residual(&sc.stages[i], state.t + c[i] * dt, &mut sc.residuals[i]);
                for pair in sc.averages.traces.iter_mut() {
                    *pair = [FaceSide::default(); 2];
                }
                disc.accumulate_traces(&sc.stages[i], 1.0, true, &mut sc.averages.traces, None);
            }
            self.exchange_faces(state.t, dt, Some(i))?;
            let mut r = std::mem::take(&mut self.scratch.residuals[i]);
            self.add_surface_correction(&mut r);
            self.scratch.residuals[i] = r;
        }

        let b = self.disc.tableau.b();
        let mut buf = std::mem::take(&mut self.scratch.stages[0]);
        buf.copy_from_slice(&self.scratch.un);
        for (r, &bj) in self.scratch.residuals.iter().zip(b) {
            let w = dt * bj;
            for (o, x) in buf.iter_mut().zip(r) {
                *o -= w * x;
            }
        }
        let checked = self.disc.check_field(&buf, state.t, None);
        if checked.is_ok() {
            std::mem::swap(&mut state.data, &mut buf);
            state.t += dt;
            state.step += 1;
        }
        self.scratch.stages[0] = buf;
        checked
    }
}
