//! Quadrature meshes on origin-centred circles and spheres, and the tubular
//! chart p = s + t·n(s) around them.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::symbols::{norm, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_HALF_WIDTH_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshLayout {
    /// Equally spaced angles θ_i = 2πi/M.
    UniformCircle,
    /// Gauss–Legendre in cos θ times a uniform azimuth grid.
    SphereProduct { polar: usize, azimuthal: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    dimension: usize,
    radius: f64,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    layout: MeshLayout,
}

impl SurfaceMesh {
    /// For a circle `resolution` is the node count; for a sphere it is the
    /// number of polar Gauss nodes, with twice as many azimuthal angles.
    pub fn build(radius: f64, dimension: usize, resolution: usize) -> Result<Self> {
        match dimension {
            2 => Self::circle(radius, resolution),
            3 => Self::sphere(radius, resolution, 2 * resolution),
            _ => Err(Error::Config(format!(
                "surface dimension must be 2 or 3, got {dimension}"
            ))),
        }
    }

    pub fn circle(radius: f64, nodes: usize) -> Result<Self> {
        check_radius(radius)?;
        if nodes < 4 {
            return Err(Error::Config(format!(
                "surface resolution must be at least 4, got {nodes}"
            )));
        }
        let w = 2.0 * PI * radius / nodes as f64;
        let pts = (0..nodes)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / nodes as f64;
                [radius * th.cos(), radius * th.sin(), 0.0]
            })
            .collect();
        Ok(Self {
            dimension: 2,
            radius,
            nodes: pts,
            weights: vec![w; nodes],
            layout: MeshLayout::UniformCircle,
        })
    }

    pub fn sphere(radius: f64, polar: usize, azimuthal: usize) -> Result<Self> {
        check_radius(radius)?;
        if polar < 4 || azimuthal < 4 {
            return Err(Error::Config(format!(
                "sphere resolution must be at least 4 in each direction, got {polar}x{azimuthal}"
            )));
        }
        let (z, gw) = gauss_legendre(polar);
        let dphi = 2.0 * PI / azimuthal as f64;
        let mut nodes = Vec::with_capacity(polar * azimuthal);
        let mut weights = Vec::with_capacity(polar * azimuthal);
        for (zi, wi) in z.iter().zip(&gw) {
            let st = (1.0 - zi * zi).sqrt();
            for j in 0..azimuthal {
                let phi = j as f64 * dphi;
                nodes.push([radius * st * phi.cos(), radius * st * phi.sin(), radius * zi]);
                weights.push(radius * radius * wi * dphi);
            }
        }
        Ok(Self {
            dimension: 3,
            radius,
            nodes,
            weights,
            layout: MeshLayout::SphereProduct { polar, azimuthal },
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn layout(&self) -> MeshLayout {
        self.layout
    }

    /// Exact measure of the surface: 2πR or 4πR².
    pub fn exact_area(&self) -> f64 {
        match self.dimension {
            2 => 2.0 * PI * self.radius,
            _ => 4.0 * PI * self.radius * self.radius,
        }
    }

    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    pub fn unit_normal(&self, i: usize) -> Point {
        let s = &self.nodes[i];
        let r = norm(s);
        [s[0] / r, s[1] / r, s[2] / r]
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("surface radius must be positive, got {radius}")))
    }
}

/// Tubular neighbourhood S × (−r, r) → ℝⁿ, (s, t) ↦ s + t·s/|s|.
#[derive(Debug, Clone, PartialEq)]
pub struct TubularChart {
    mesh: SurfaceMesh,
    half_width: f64,
}

impl TubularChart {
    pub fn new(mesh: SurfaceMesh, half_width_fraction: f64) -> Result<Self> {
        if !(half_width_fraction > 0.0 && half_width_fraction <= 0.5) {
            return Err(Error::Config(format!(
                "half_width_fraction must lie in (0, 0.5], got {half_width_fraction}"
            )));
        }
        let half_width = half_width_fraction * mesh.radius();
        Ok(Self { mesh, half_width })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// L(s, t) for an arbitrary point s on the surface.
    pub fn map(&self, s: &Point, t: f64) -> Point {
        let scale = 1.0 + t / norm(s);
        [s[0] * scale, s[1] * scale, s[2] * scale]
    }

    /// L(s_i, t) for mesh node i.
    pub fn map_node(&self, i: usize, t: f64) -> Point {
        self.map(&self.mesh.nodes()[i], t)
    }

    /// Volume Jacobian ρ(s, t); constant along the surface for spheres.
    pub fn jacobian(&self, t: f64) -> f64 {
        let ratio = (self.mesh.radius() + t) / self.mesh.radius();
        match self.mesh.dimension() {
            2 => ratio,
            _ => ratio * ratio,
        }
    }
}
