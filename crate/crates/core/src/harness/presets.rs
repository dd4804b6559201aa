use serde::Serialize;

use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::grid::GridDims;
use crate::message::MessageShape;

/// Flag assignment of one ablation row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AblationPreset {
    pub name: &'static str,
    pub mutation_on: bool,
    pub homogeneous_init: bool,
    pub selection_on: bool,
    pub evolution_on: bool,
    pub skip_connection_on: bool,
    pub message_shape: MessageShape,
}

const fn row(
    name: &'static str,
    mutation_on: bool,
    homogeneous_init: bool,
    selection_on: bool,
    evolution_on: bool,
    skip_connection_on: bool,
    message_shape: MessageShape,
) -> AblationPreset {
    AblationPreset {
        name,
        mutation_on,
        homogeneous_init,
        selection_on,
        evolution_on,
        skip_connection_on,
        message_shape,
    }
}

const SEQ: MessageShape = MessageShape::SEQUENCE;

pub const PRESETS: [AblationPreset; 8] = [
    row("baseline", true, false, true, true, true, SEQ),
    row("no_evolution", false, false, false, false, true, SEQ),
    row("no_variation", false, true, false, true, true, SEQ),
    row("no_mutation", false, false, true, true, true, SEQ),
    row("no_skip", true, true, true, true, false, SEQ),
    row("no_selection_hom", true, true, false, true, true, SEQ),
    row("no_selection_het", true, false, false, true, true, SEQ),
    row("simplified", true, false, true, true, true, MessageShape::FLAT),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn preset(name: &str) -> Result<AblationPreset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .copied()
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_owned(),
            known: preset_names().join(", "),
        })
}

impl AblationPreset {
    pub fn apply(&self, config: &mut GridConfig) {
        config.mutation_on = self.mutation_on;
        config.homogeneous_init = self.homogeneous_init;
        config.selection_on = self.selection_on;
        config.evolution_on = self.evolution_on;
        config.skip_connection_on = self.skip_connection_on;
        config.set_message_shape(self.message_shape);
    }

    pub fn config(&self, base: &GridConfig) -> GridConfig {
        let mut c = base.clone();
        self.apply(&mut c);
        c
    }
}

/// Run scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 16×16, 2000 steps.
    Ci,
    /// 32×32, 10000 steps.
    Paper,
}

impl Profile {
    pub fn dims(self) -> GridDims {
        match self {
            Profile::Ci => GridDims::new(16, 16),
            Profile::Paper => GridDims::new(32, 32),
        }
    }

    pub fn steps(self) -> u64 {
        match self {
            Profile::Ci => 2000,
            Profile::Paper => 10000,
        }
    }

    pub fn apply(self, config: &mut GridConfig) {
        config.set_dims(self.dims());
        config.steps = self.steps();
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(Profile::Ci),
            "paper" => Ok(Profile::Paper),
            _ => Err(Error::Config(format!("unknown profile `{s}` (expected ci or paper)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (name, Mut., Same init, Sel.) as tabulated for the ablations.
    const TABLE: [(&str, bool, bool, bool); 8] = [
        ("baseline", true, false, true),
        ("no_evolution", false, false, false),
        ("no_variation", false, true, false),
        ("no_mutation", false, false, true),
        ("no_skip", true, true, true),
        ("no_selection_hom", true, true, false),
        ("no_selection_het", true, false, false),
        ("simplified", true, false, true),
    ];

    #[test]
    fn flag_matrix_matches_table() {
        for (name, m, same, sel) in TABLE {
            let p = preset(name).unwrap();
            assert_eq!((p.mutation_on, p.homogeneous_init, p.selection_on), (m, same, sel), "{name}");
            assert_eq!(p.evolution_on, name != "no_evolution", "{name}");
            assert_eq!(p.skip_connection_on, name != "no_skip", "{name}");
            let shape = if name == "simplified" { MessageShape::FLAT } else { MessageShape::SEQUENCE };
            assert_eq!(p.message_shape, shape, "{name}");
        }
    }

    #[test]
    fn unknown_preset_lists_known_names() {
        let e = preset("nope").unwrap_err().to_string();
        for name in preset_names() {
            assert!(e.contains(name));
        }
    }

    #[test]
    fn apply_sets_flags() {
        let c = preset("simplified").unwrap().config(&GridConfig::default());
        assert_eq!(c.message_shape(), MessageShape::FLAT);
        assert!(c.validate().is_ok());
        let c = preset("no_skip").unwrap().config(&GridConfig::default());
        assert!(!c.skip_connection_on && c.homogeneous_init);
    }

    #[test]
    fn profiles() {
        let mut c = GridConfig::default();
        Profile::Ci.apply(&mut c);
        assert_eq!((c.rows, c.cols, c.steps), (16, 16, 2000));
        let p: Profile = "paper".parse().unwrap();
        p.apply(&mut c);
        assert_eq!((c.rows, c.cols, c.steps), (32, 32, 10000));
    }
}
