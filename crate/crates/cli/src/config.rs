//! Run-configuration schema (TOML) and construction of the model objects.

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use krein::geometry::{Geometry, ManifoldSpec, Point};
use krein::lee::LeeModel;
use krein::point_interaction::{CenterSet, PointSystem};
use krein::relativistic::RelativisticModel;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub geometry: GeometryBlock,
    pub model: ModelBlock,
    #[serde(default)]
    pub task: TaskBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub kind: String,
    pub dimension: Option<usize>,
    pub lengths: Option<Vec<f64>>,
    pub radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(rename = "type")]
    pub kind: String,
    pub mass: f64,
    #[serde(default)]
    pub centers: Vec<Vec<f64>>,
    #[serde(default)]
    pub bindings: Vec<f64>,
    pub coupling: Option<f64>,
    pub binding: Option<f64>,
    pub modes: Option<usize>,
    pub n_max: Option<usize>,
    pub sector: Option<usize>,
    /// Cartan-Hadamard mass scale for relativistic log-shape reports
    /// (externally defined; never asserted).
    pub m_ch: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    pub window: Option<[f64; 2]>,
    pub scan_points: Option<usize>,
    pub energies: Option<Vec<f64>>,
    pub energy_pairs: Option<Vec<[f64; 2]>>,
    pub complex_energies: Option<Vec<[f64; 2]>>,
    pub points: Option<Vec<Vec<f64>>>,
    pub k_max: Option<usize>,
    pub e0: Option<f64>,
    pub subordination_s: Option<Vec<f64>>,
    pub subordination_lambda: Option<Vec<f64>>,
    pub couplings: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub basis_modes: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Option<String>,
    pub path: Option<String>,
    #[serde(default)]
    pub plot_data: bool,
    pub plot_dir: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| anyhow!("{e}"))?;
        if cfg.schema_version != 1 {
            bail!("unsupported schema_version {}", cfg.schema_version);
        }
        Ok(cfg)
    }

    pub fn geometry(&self) -> anyhow::Result<Geometry> {
        match self.geometry.kind.as_str() {
            "flat" => Ok(Geometry::FlatSpace {
                dim: self.geometry.dimension.unwrap_or(2),
            }),
            "flat-torus" => Ok(Geometry::FlatTorus {
                lengths: self
                    .geometry
                    .lengths
                    .clone()
                    .ok_or_else(|| anyhow!("geometry.lengths required for flat-torus"))?,
            }),
            "sphere" => Ok(Geometry::Sphere2 {
                radius: self
                    .geometry
                    .radius
                    .ok_or_else(|| anyhow!("geometry.radius required for sphere"))?,
            }),
            "hyperbolic" => Ok(Geometry::Hyperbolic2 {
                radius: self
                    .geometry
                    .radius
                    .ok_or_else(|| anyhow!("geometry.radius required for hyperbolic"))?,
            }),
            other => bail!("unknown geometry kind {other:?}"),
        }
    }

    fn points(&self, geometry: &Geometry) -> anyhow::Result<Vec<Point>> {
        let spec = ManifoldSpec::new(geometry.clone(), 1.0).map_err(|e| anyhow!("{e}"))?;
        self.model
            .centers
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_empty() || c.len() > 3 {
                    bail!("model.centers[{i}] must have 1..=3 coordinates");
                }
                let mut coords = [0.0; 3];
                coords[..c.len()].copy_from_slice(c);
                spec.point(coords)
                    .with_context(|| format!("model.centers[{i}]"))
                    .map_err(|e| anyhow!("{e}"))
            })
            .collect()
    }

    pub fn point_system(&self) -> anyhow::Result<PointSystem> {
        if self.model.kind != "nonrelativistic" {
            bail!("model.type must be \"nonrelativistic\" for this command");
        }
        let geometry = self.geometry()?;
        let centers = CenterSet::new(
            self.points(&geometry)?,
            self.model.bindings.clone(),
            self.model.mass,
        )
        .map_err(|e| anyhow!("model: {e}"))?;
        PointSystem::new(geometry, centers).map_err(|e| anyhow!("model: {e}"))
    }

    pub fn relativistic(&self) -> anyhow::Result<RelativisticModel> {
        if self.model.kind != "relativistic" {
            bail!("model.type must be \"relativistic\" for this command");
        }
        let geometry = self.geometry()?;
        let mut model = RelativisticModel::new(
            geometry.clone(),
            self.points(&geometry)?,
            self.model.bindings.clone(),
            self.model.mass,
        )
        .map_err(|e| anyhow!("model: {e}"))?;
        model.m_ch = self.model.m_ch;
        Ok(model)
    }

    pub fn lee(&self) -> anyhow::Result<LeeModel> {
        if self.model.kind != "lee" {
            bail!("model.type must be \"lee\" for this command");
        }
        let geometry = self.geometry()?;
        let center = self
            .model
            .centers
            .first()
            .ok_or_else(|| anyhow!("lee model needs one center"))?;
        let mut coords = [0.0; 3];
        coords[..center.len().min(3)].copy_from_slice(&center[..center.len().min(3)]);
        LeeModel::new(
            geometry,
            coords,
            self.model
                .coupling
                .ok_or_else(|| anyhow!("model.coupling required for lee"))?,
            self.model.mass,
            self.model
                .binding
                .ok_or_else(|| anyhow!("model.binding required for lee"))?,
            self.model.modes.unwrap_or(25),
        )
        .map_err(|e| anyhow!("model: {e}"))
    }
}
