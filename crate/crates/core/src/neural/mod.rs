//! Network maths: initialization, gated recurrent steps, attention, the
//! entropy-targeted softmax, categorical sampling, the global state update,
//! message generation, the task policy and mutation.

mod attention;
pub mod fastmath;
mod gated;
mod generator;
mod genome;
mod global;
mod init;
mod mutate;
mod policy;
mod softmax;

pub use attention::{attention_logits, AttentionScratch, MessageBatch};
pub use gated::gated_step;
pub use generator::generate_message;
pub use genome::{Dense, Genome, GenomeLayout, LayerSpec, GLOBAL_STATE, MEMORY_STATE, TASK_ACTIONS, TASK_BINS, TASK_HIDDEN, TASK_OBS, TASK_STATE};
pub use global::update_global;
pub use init::orthogonal_init;
pub use mutate::{mutate, mutate_in_place};
pub use policy::{task_policy_step, PolicyRunner};
pub use softmax::{adaptive_softmax, entropy, sample_index, softmax};

pub use fastmath::{sigmoid, tanh};

#[inline(always)]
pub fn elu(x: f64) -> f64 {
    let e = fastmath::exp(x) - 1.0;
    if x > 0.0 {
        x
    } else {
        e
    }
}
