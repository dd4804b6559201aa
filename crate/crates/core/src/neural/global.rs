use super::genome::{dot, Genome, GLOBAL_STATE};

/// `tanh(h_g + L_H([m; h_g]))` for the flattened attended message `m`.
pub fn update_global(genome: &Genome, h_g: &[f64], m: &[f64]) -> Vec<f64> {
    let layer = genome.dense(genome.layout().global);
    debug_assert_eq!(m.len() + GLOBAL_STATE, layer.inputs);
    let split = m.len();
    (0..GLOBAL_STATE)
        .map(|j| {
            let row = layer.row(j);
            let pre = layer.bias[j] + dot(&row[..split], m) + dot(&row[split..], h_g);
            super::tanh(h_g[j] + pre)
        })
        .collect()
}
