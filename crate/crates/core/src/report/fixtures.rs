//! Built-in decoupling fixtures and the JSON container for custom ones.

use serde::{Deserialize, Serialize};

use crate::decouple::DecouplingInstance;
use crate::error::{Error, Result};
use crate::qmath::{Channel, Operator, OperatorJson, SystemLayout};

/// Names of the built-in fixtures.
pub fn fixture_names() -> &'static [&'static str] {
    &["bell-identity", "bell-trace", "product-mixed", "measurement"]
}

/// Serialized custom fixture: a state together with the Choi matrix of the
/// channel applied to its A part.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureJson {
    pub state: OperatorJson,
    pub channel_in: Vec<(String, usize)>,
    pub channel_out: Vec<(String, usize)>,
    pub channel_choi: OperatorJson,
}

impl FixtureJson {
    pub fn to_instance(&self) -> Result<DecouplingInstance> {
        let rho = Operator::from_json(&self.state)?;
        let in_layout = SystemLayout::new(self.channel_in.clone())?;
        let out_layout = SystemLayout::new(self.channel_out.clone())?;
        let choi = Operator::from_json(&self.channel_choi)?;
        let channel = Channel::from_choi_matrix(in_layout, out_layout, choi.into_matrix())?;
        DecouplingInstance::new(rho, channel)
    }

    pub fn of_instance(inst: &DecouplingInstance) -> Self {
        let choi = inst.channel().to_choi();
        FixtureJson {
            state: inst.rho().to_json(),
            channel_in: inst.channel().in_layout().factors().to_vec(),
            channel_out: inst.channel().out_layout().factors().to_vec(),
            channel_choi: choi.to_json(),
        }
    }
}

/// Resolves a built-in fixture name, falling back to reading the argument as
/// a path to a [`FixtureJson`] file.
pub fn load_fixture(name: &str) -> Result<DecouplingInstance> {
    match name {
        "bell-identity" => {
            let rho = Operator::max_entangled(2, "A", "R")?;
            let t = Channel::identity(SystemLayout::single("A", 2))?;
            DecouplingInstance::new(rho, t)
        }
        "bell-trace" => {
            let phi = Operator::max_entangled(2, "AS", "R")?;
            let pi_ae = Operator::mixed_state(SystemLayout::new(vec![("AE", 4)])?);
            let rho = Operator::tensor(&[&phi, &pi_ae])?;
            let a_layout = SystemLayout::new(vec![("AS", 2), ("AE", 4)])?;
            let t = Channel::partial_trace_channel(a_layout, &["AE"])?;
            DecouplingInstance::new(rho, t)
        }
        "product-mixed" => {
            let rho = Operator::mixed_state(SystemLayout::new(vec![("A", 2), ("R", 2)])?);
            let t = Channel::identity(SystemLayout::single("A", 2))?;
            DecouplingInstance::new(rho, t)
        }
        "measurement" => {
            let rho = Operator::max_entangled(2, "A", "R")?;
            let t = Channel::dephasing(SystemLayout::single("A", 2))?;
            DecouplingInstance::new(rho, t)
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.into(),
                source,
            })?;
            let json: FixtureJson =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            json.to_instance()
        }
    }
}
