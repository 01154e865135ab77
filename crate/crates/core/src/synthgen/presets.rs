use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Generator, Rect, TwoSquareParams, VoronoiParams};
use crate::error::{Error, Result};
use crate::filtration::GridSpec;

/// Named experiment configuration: a dataset generator (absent for
/// user-supplied data) together with its grid resolution.
#[derive(Clone)]
pub struct Preset {
    pub name: &'static str,
    pub family: &'static str,
    pub generator: Option<Arc<dyn Generator>>,
    pub delta_x: f64,
    /// Fixed grid rectangle; `None` means the padded bounding box.
    pub grid_rect: Option<Rect>,
}

impl Preset {
    /// Grid over `grid_rect`, when the preset fixes one.
    pub fn fixed_grid(&self) -> Option<Result<GridSpec>> {
        self.grid_rect
            .map(|r| GridSpec::covering(&r.lower, &r.upper, self.delta_x))
    }
}

impl std::fmt::Debug for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Preset")
            .field("name", &self.name)
            .field("family", &self.family)
            .field("delta_x", &self.delta_x)
            .field("grid_rect", &self.grid_rect)
            .finish_non_exhaustive()
    }
}

pub struct PresetRegistry {
    presets: BTreeMap<&'static str, Preset>,
}

impl PresetRegistry {
    pub fn empty() -> Self {
        Self {
            presets: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, preset: Preset) {
        self.presets.insert(preset.name, preset);
    }

    pub fn get(&self, name: &str) -> Result<&Preset> {
        self.presets.get(name).ok_or_else(|| Error::UnknownName {
            what: "preset",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    /// Looks up `name` and checks it belongs to `family`.
    pub fn get_in(&self, family: &str, name: &str) -> Result<&Preset> {
        let p = self.get(name)?;
        if p.family != family {
            return Err(Error::InvalidParameter(format!(
                "preset {name} belongs to family {}, not {family}",
                p.family
            )));
        }
        Ok(p)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.presets.keys().copied().collect()
    }
}

impl Default for PresetRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        let two_square = |name, params: TwoSquareParams| Preset {
            name,
            family: "two-square",
            generator: Some(Arc::new(params)),
            delta_x: 0.02,
            grid_rect: None,
        };
        reg.register(two_square(
            "david-goliath",
            TwoSquareParams::david_goliath(),
        ));
        reg.register(two_square("antman", TwoSquareParams::antman()));
        reg.register(two_square("antman-noisy", TwoSquareParams::antman_noisy()));
        reg.register(two_square(
            "antman-outliers",
            TwoSquareParams::antman_outliers(),
        ));
        for name in ["voronoi-noisy", "paper"] {
            let params = VoronoiParams::default();
            let crop = params.crop().expect("default crop");
            reg.register(Preset {
                name,
                family: "voronoi",
                generator: Some(Arc::new(params)),
                delta_x: 0.01,
                grid_rect: Some(crop),
            });
        }
        reg.register(Preset {
            name: "towers",
            family: "towers",
            generator: None,
            delta_x: 0.260,
            grid_rect: Some(Rect::new([-126.0, 23.9], [-65.8, 50.0]).expect("tower box")),
        });
        reg
    }
}
