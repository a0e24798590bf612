use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Physical defaults for one furniture label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelCatalogEntry {
    pub label: String,
    /// Maximum inward distance from the edge that stays sittable (0 = not
    /// sittable at all).
    pub sittable_threshold_eps: f64,
    /// Free radius a seated body needs around a sittable point.
    pub clearance_rho: f64,
    /// Effort units per meter of translation.
    pub unit_weight: f64,
    pub lightweight: bool,
    pub movable: bool,
    pub standable_obstacle: bool,
}

impl LabelCatalogEntry {
    pub fn validate(&self) -> Result<()> {
        if self.sittable_threshold_eps < 0.0 || !self.sittable_threshold_eps.is_finite() {
            return Err(Error::Config(format!(
                "catalog label '{}': eps_m must be >= 0",
                self.label
            )));
        }
        if self.clearance_rho < 0.0 || !self.clearance_rho.is_finite() {
            return Err(Error::Config(format!(
                "catalog label '{}': rho_m must be >= 0",
                self.label
            )));
        }
        if self.unit_weight < 0.0 || !self.unit_weight.is_finite() {
            return Err(Error::Config(format!(
                "catalog label '{}': weight must be >= 0",
                self.label
            )));
        }
        Ok(())
    }
}

/// Partial catalog entry as it appears in catalog files and scene overrides;
/// absent fields keep the value they would otherwise resolve to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogPatch {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lightweight: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standable_obstacle: Option<bool>,
}

impl CatalogPatch {
    fn apply(&self, entry: &mut LabelCatalogEntry) {
        if let Some(v) = self.eps_m {
            entry.sittable_threshold_eps = v;
        }
        if let Some(v) = self.rho_m {
            entry.clearance_rho = v;
        }
        if let Some(v) = self.weight {
            entry.unit_weight = v;
        }
        if let Some(v) = self.lightweight {
            entry.lightweight = v;
        }
        if let Some(v) = self.movable {
            entry.movable = v;
        }
        if let Some(v) = self.standable_obstacle {
            entry.standable_obstacle = v;
        }
    }

    fn from_entry(entry: &LabelCatalogEntry) -> Self {
        CatalogPatch {
            eps_m: Some(entry.sittable_threshold_eps),
            rho_m: Some(entry.clearance_rho),
            weight: Some(entry.unit_weight),
            lightweight: Some(entry.lightweight),
            movable: Some(entry.movable),
            standable_obstacle: Some(entry.standable_obstacle),
        }
    }
}

/// Label → attribute map with a fallback entry for unknown labels.
///
/// The reserved label `"default"` patches the fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelCatalog {
    entries: BTreeMap<String, LabelCatalogEntry>,
    fallback: LabelCatalogEntry,
}

pub(crate) const DEFAULT_LABEL: &str = "default";

impl LabelCatalog {
    /// Built-in defaults: common sittable furniture at eps 0.70 m, bulky
    /// non-sittable storage at eps 0, small portable items as lightweight.
    /// Every value is overridable via catalog files or scene overrides.
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        let mut add = |label: &str, eps: f64, weight: f64, lightweight: bool| {
            entries.insert(
                label.to_string(),
                LabelCatalogEntry {
                    label: label.to_string(),
                    sittable_threshold_eps: eps,
                    clearance_rho: 0.40,
                    unit_weight: weight,
                    lightweight,
                    movable: true,
                    standable_obstacle: true,
                },
            );
        };
        // Sittable furniture.
        add("table", 0.70, 30.0, false);
        add("chair", 0.70, 7.0, false);
        add("sofa", 0.70, 45.0, false);
        add("bed", 0.70, 60.0, false);
        // Non-sittable bulky furniture.
        add("shelf", 0.0, 40.0, false);
        add("cabinet", 0.0, 50.0, false);
        add("appliance", 0.0, 55.0, false);
        // Small portable items, excluded from spatial computation.
        for small in [
            "pillow",
            "cushion",
            "blanket",
            "laptop",
            "book",
            "lamp",
            "alarm_clock",
            "phone",
            "monitor",
            "keyboard",
            "plant",
            "toy",
        ] {
            add(small, 0.0, 1.0, true);
        }
        let fallback = LabelCatalogEntry {
            label: DEFAULT_LABEL.to_string(),
            sittable_threshold_eps: 0.0,
            clearance_rho: 0.40,
            unit_weight: 20.0,
            lightweight: false,
            movable: true,
            standable_obstacle: true,
        };
        LabelCatalog { entries, fallback }
    }

    /// Attributes for a label; unknown labels resolve to the fallback entry
    /// (with the queried label substituted).
    pub fn resolve(&self, label: &str) -> LabelCatalogEntry {
        match self.entries.get(label) {
            Some(e) => e.clone(),
            None => LabelCatalogEntry {
                label: label.to_string(),
                ..self.fallback.clone()
            },
        }
    }

    /// Apply partial overrides (catalog file or scene `catalog_overrides`).
    pub fn apply_patches(&mut self, patches: &BTreeMap<String, CatalogPatch>) -> Result<()> {
        for (label, patch) in patches {
            if label == DEFAULT_LABEL {
                patch.apply(&mut self.fallback);
                self.fallback.validate()?;
                continue;
            }
            let mut entry = self.resolve(label);
            patch.apply(&mut entry);
            entry.validate()?;
            self.entries.insert(label.clone(), entry);
        }
        Ok(())
    }

    /// Full patch map describing every known entry plus the fallback; saving
    /// this with a scene makes reloads resolve identically anywhere.
    pub fn to_patches(&self) -> BTreeMap<String, CatalogPatch> {
        let mut out: BTreeMap<String, CatalogPatch> = self
            .entries
            .iter()
            .map(|(label, entry)| (label.clone(), CatalogPatch::from_entry(entry)))
            .collect();
        out.insert(
            DEFAULT_LABEL.to_string(),
            CatalogPatch::from_entry(&self.fallback),
        );
        out
    }
}
