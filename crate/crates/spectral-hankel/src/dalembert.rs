use field_core::{CauchyData, FieldError, ModeIndex, RadialProfile};

/// Odd extension of a piecewise-linear interpolant of w = r v through w(0) = 0,
/// with its (even) antiderivative. Zero beyond the last node.
struct OddLinear {
    nodes: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl OddLinear {
    fn new(r: &[f64], w: &[f64]) -> Self {
        let mut nodes = vec![0.0];
        nodes.extend_from_slice(r);
        let mut values = vec![0.0];
        values.extend_from_slice(w);
        let mut cumulative = vec![0.0];
        for i in 1..nodes.len() {
            let seg = 0.5 * (nodes[i] - nodes[i - 1]) * (values[i] + values[i - 1]);
            cumulative.push(cumulative[i - 1] + seg);
        }
        Self { nodes, values, cumulative }
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let last = *self.nodes.last().unwrap();
        if x >= last {
            return None;
        }
        let i = self.nodes.partition_point(|&n| n <= x).max(1);
        let t = (x - self.nodes[i - 1]) / (self.nodes[i] - self.nodes[i - 1]);
        Some((i, t))
    }

    fn value(&self, x: f64) -> f64 {
        let sign = x.signum();
        match self.locate(x.abs()) {
            Some((i, t)) => sign * ((1.0 - t) * self.values[i - 1] + t * self.values[i]),
            None => 0.0,
        }
    }

    fn antiderivative(&self, x: f64) -> f64 {
        let a = x.abs();
        match self.locate(a) {
            Some((i, t)) => {
                let h = self.nodes[i] - self.nodes[i - 1];
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                self.cumulative[i - 1] + h * (v0 * t + 0.5 * (v1 - v0) * t * t)
            }
            None => *self.cumulative.last().unwrap(),
        }
    }
}

/// Independent physical-space evolution of radial d = 3 data through the
/// half-line d'Alembert formula for w = r u with w(t, 0) = 0. Test oracle.
pub fn dalembert_oracle_d3(state: &CauchyData, t: f64) -> Result<RadialProfile, FieldError> {
    let mode = ModeIndex::radial(field_core::Dimension::Three);
    if state.dim != field_core::Dimension::Three || state.modes.keys().any(|m| *m != mode) {
        return Err(FieldError::NonRadial);
    }
    let grid = state.grid;
    let r = grid.r_nodes();
    let Some(ms) = state.modes.get(&mode) else {
        return RadialProfile::zeros(mode, grid).with_physical(vec![0.0; grid.cells()]);
    };
    let phys = |p: &RadialProfile| -> Result<Vec<f64>, FieldError> {
        p.physical.clone().ok_or_else(|| FieldError::MissingPhysical("oracle input".into()))
    };
    let w0: Vec<f64> = phys(&ms.field)?.iter().zip(&r).map(|(v, r)| v * r).collect();
    let w1: Vec<f64> = phys(&ms.velocity)?.iter().zip(&r).map(|(v, r)| v * r).collect();
    let f = OddLinear::new(&r, &w0);
    let g = OddLinear::new(&r, &w1);
    let u: Vec<f64> = r
        .iter()
        .map(|&x| {
            let w = 0.5 * (f.value(x + t) + f.value(x - t)) + 0.5 * (g.antiderivative(x + t) - g.antiderivative(x - t));
            w / x
        })
        .collect();
    RadialProfile::zeros(mode, grid).with_physical(u)
}
