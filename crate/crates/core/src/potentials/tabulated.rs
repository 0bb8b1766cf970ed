//! Potentials sampled on a centred hypercube grid.
//!
//! V̂ is computed once by a zero-padded FFT (rectangle rule on the grid) and
//! evaluated off-lattice by tensor-product 6-point Lagrange interpolation.
//!
//! Grid conventions: `samples` (even) points per edge at
//! x_i = −edge/2 + i·edge/samples, values row-major with the last axis
//! fastest. V must be negligible at the box boundary.
//!
//! Sampling bound: with Δx = edge/samples the resolved band is the cube
//! |k_i| ≤ π/(2Δx) (half the Nyquist frequency); construction fails unless
//! that covers the requested band, e.g. 2R(1 + f) for a surface of radius R
//! and tube fraction f.

use super::SignFlag;
use crate::error::{Error, Result};
use crate::fft::FftNd;
use crate::symbols::Point;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::{BufRead, Read, Write};
use std::path::Path;

const BINARY_MAGIC: &[u8; 8] = b"RBGRID01";
const SIGN_SAMPLE_COUNT: usize = 100_000;
/// Target spacing of the padded reciprocal lattice.
const MAX_RECIPROCAL_SPACING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    dimension: usize,
    edge: f64,
    samples: usize,
    values: Vec<f64>,
}

impl PotentialGrid {
    pub fn new(dimension: usize, edge: f64, samples: usize, values: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "grid dimension must be 2 or 3, got {dimension}"
            )));
        }
        if !(edge.is_finite() && edge > 0.0) {
            return Err(Error::InvalidInput(format!("grid edge must be positive, got {edge}")));
        }
        if samples < 4 || samples % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "samples per edge must be even and at least 4, got {samples}"
            )));
        }
        let expect = samples.pow(dimension as u32);
        if values.len() != expect {
            return Err(Error::InvalidInput(format!(
                "grid needs {expect} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid contains non-finite values".into()));
        }
        Ok(Self {
            dimension,
            edge,
            samples,
            values,
        })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn<F: Fn(&Point) -> f64>(dimension: usize, edge: f64, samples: usize, f: F) -> Result<Self> {
        let total = samples.pow(dimension as u32);
        let dx = edge / samples as f64;
        let values = (0..total)
            .map(|idx| {
                let mut p = [0.0; 3];
                let mut rest = idx;
                for d in (0..dimension).rev() {
                    p[d] = -0.5 * edge + (rest % samples) as f64 * dx;
                    rest /= samples;
                }
                f(&p)
            })
            .collect();
        Self::new(dimension, edge, samples, values)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.edge / self.samples as f64
    }

    /// Rectangle-rule ∫V.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing().powi(self.dimension as i32)
    }

    /// Multilinear interpolation; zero outside the box.
    pub fn value_at(&self, x: &Point) -> f64 {
        let n = self.samples;
        let dx = self.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for d in 0..self.dimension {
            let u = (x[d] + 0.5 * self.edge) / dx;
            if !(0.0..=(n - 1) as f64).contains(&u) {
                return 0.0;
            }
            let i = (u.floor() as usize).min(n - 2);
            base[d] = i;
            frac[d] = u - i as f64;
        }
        let corners = 1usize << self.dimension;
        let mut acc = 0.0;
        for c in 0..corners {
            let mut idx = 0;
            let mut w = 1.0;
            for d in 0..self.dimension {
                let bit = (c >> d) & 1;
                idx = idx * n + base[d] + bit;
                w *= if bit == 1 { frac[d] } else { 1.0 - frac[d] };
            }
            acc += w * self.values[idx];
        }
        acc
    }

    /// Text format: a header line `dimension edge samples` followed by the
    /// values, whitespace separated, row-major. Lines starting with `#` are
    /// ignored.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut tokens = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        if tokens.len() < 3 {
            return Err(Error::InvalidInput("grid file is missing its header".into()));
        }
        let bad = |what: &str| Error::InvalidInput(format!("malformed grid header field {what}"));
        let dimension: usize = tokens[0].parse().map_err(|_| bad("dimension"))?;
        let edge: f64 = tokens[1].parse().map_err(|_| bad("edge"))?;
        let samples: usize = tokens[2].parse().map_err(|_| bad("samples"))?;
        let values = tokens[3..]
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("malformed grid value {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dimension, edge, samples, values)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# dimension edge samples, then row-major values")?;
        writeln!(w, "{} {:e} {}", self.dimension, self.edge, self.samples)?;
        for row in self.values.chunks(self.samples) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Binary format: magic `RBGRID01`, u32 dimension, f64 edge, u32 samples,
    /// then f64 values; all little-endian.
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::InvalidInput("not a binary potential grid (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let dimension = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8)?;
        let edge = f64::from_le_bytes(b8);
        r.read_exact(&mut b4)?;
        let samples = u32::from_le_bytes(b4) as usize;
        if !(2..=3).contains(&dimension) || samples > 4096 {
            return Err(Error::InvalidInput("implausible binary grid header".into()));
        }
        let total = samples.pow(dimension as u32);
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        Self::new(dimension, edge, samples, values)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.dimension as u32).to_le_bytes())?;
        w.write_all(&self.edge.to_le_bytes())?;
        w.write_all(&(self.samples as u32).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads either format, sniffing the magic bytes.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            Self::read_binary(&bytes[..])
        } else {
            Self::read_text(&bytes[..])
        }
    }
}

#[derive(Debug, Clone)]
pub struct TabulatedPotential {
    grid: PotentialGrid,
    band: f64,
    padded: usize,
    reciprocal_spacing: f64,
    spectrum: Vec<Complex64>,
    sign: SignFlag,
}

impl TabulatedPotential {
    /// `required_band` is the largest |k_i| at which V̂ will be queried.
    pub fn new(grid: PotentialGrid, required_band: f64) -> Result<Self> {
        let dx = grid.spacing();
        let band = PI / (2.0 * dx);
        if !(required_band > 0.0) || band < required_band {
            return Err(Error::Config(format!(
                "tabulated potential under-sampled: resolved band π/(2Δx) = {band:.4} must cover the \
                 required band {required_band:.4}; use at most Δx = {:.4}",
                PI / (2.0 * required_band)
            )));
        }
        let n = grid.samples();
        let dim = grid.dimension();
        let cap = if dim == 2 { 1024 } else { 128 };
        let mut padded = (2 * n).next_power_of_two();
        while padded < cap && 2.0 * PI / (padded as f64 * dx) > MAX_RECIPROCAL_SPACING {
            padded *= 2;
        }
        let total = padded.pow(dim as u32);
        let mut data = vec![Complex64::default(); total];
        // place sample with offset o = i − n/2 at padded index o mod padded
        let wrap = |i: usize| (i as i64 - (n / 2) as i64).rem_euclid(padded as i64) as usize;
        for (idx, v) in grid.values().iter().enumerate() {
            let mut rest = idx;
            let mut coords = [0usize; 3];
            for d in (0..dim).rev() {
                coords[d] = wrap(rest % n);
                rest /= n;
            }
            let target = coords[..dim].iter().fold(0, |acc, &c| acc * padded + c);
            data[target] = Complex64::new(*v, 0.0);
        }
        let fft = FftNd::new(&vec![padded; dim]);
        let mut spectrum = data;
        fft.forward(&mut spectrum);
        let scale = (2.0 * PI).powf(-(dim as f64) / 2.0) * dx.powi(dim as i32);
        spectrum.iter_mut().for_each(|z| *z *= scale);
        let sign = classify_grid(&grid);
        Ok(Self {
            band,
            padded,
            reciprocal_spacing: 2.0 * PI / (padded as f64 * dx),
            spectrum,
            sign,
            grid,
        })
    }

    pub fn grid(&self) -> &PotentialGrid {
        &self.grid
    }

    /// Half-width of the resolved cube in k-space.
    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn padded_size(&self) -> usize {
        self.padded
    }

    pub fn sign(&self) -> SignFlag {
        self.sign
    }

    pub fn value_at(&self, x: &Point) -> f64 {
        self.grid.value_at(x)
    }

    pub fn fourier_at(&self, k: &Point) -> Result<Complex64> {
        let dim = self.grid.dimension();
        if k[..dim].iter().any(|c| c.abs() > self.band) {
            return Err(Error::OutOfBand {
                k: k[..dim].to_vec(),
                band: self.band,
            });
        }
        let h = self.reciprocal_spacing;
        let p = self.padded as i64;
        let mut idx = [[0usize; 6]; 3];
        let mut wts = [[0.0f64; 6]; 3];
        for d in 0..dim {
            let u = k[d] / h;
            let base = u.floor() as i64 - 2;
            let x = u - base as f64;
            for a in 0..6 {
                idx[d][a] = (base + a as i64).rem_euclid(p) as usize;
                let mut w = 1.0;
                for b in 0..6 {
                    if b != a {
                        w *= (x - b as f64) / (a as f64 - b as f64);
                    }
                }
                wts[d][a] = w;
            }
        }
        let pz = self.padded;
        let mut acc = Complex64::default();
        if dim == 2 {
            for a in 0..6 {
                let row = idx[0][a] * pz;
                let mut inner = Complex64::default();
                for b in 0..6 {
                    inner += self.spectrum[row + idx[1][b]] * wts[1][b];
                }
                acc += inner * wts[0][a];
            }
        } else {
            for a in 0..6 {
                for b in 0..6 {
                    let row = (idx[0][a] * pz + idx[1][b]) * pz;
                    let mut inner = Complex64::default();
                    for c in 0..6 {
                        inner += self.spectrum[row + idx[2][c]] * wts[2][c];
                    }
                    acc += inner * (wts[0][a] * wts[1][b]);
                }
            }
        }
        Ok(acc)
    }
}

fn classify_grid(grid: &PotentialGrid) -> SignFlag {
    let values = grid.values();
    let (mut neg, mut pos) = (false, false);
    let mut look = |v: f64| {
        neg |= v < 0.0;
        pos |= v > 0.0;
    };
    if values.len() <= SIGN_SAMPLE_COUNT {
        values.iter().for_each(|&v| look(v));
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5167_4e5f);
        for _ in 0..SIGN_SAMPLE_COUNT {
            look(values[rng.random_range(0..values.len())]);
        }
    }
    match (neg, pos) {
        (true, true) => SignFlag::SignChanging,
        (_, false) => SignFlag::Nonpositive,
        (false, true) => SignFlag::Nonnegative,
    }
}
