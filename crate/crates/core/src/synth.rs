//! Ground-truth cell shapes rendered as colour images.
//!
//! A pixel belongs to a shape when its centre satisfies the shape's
//! inequality. There is no anti-aliasing, so masks are exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{parse_key_values, parse_rgb, ConfigError};
use crate::raster::{RasterImage, Rgb};

/// Minimum gap between a shape's extent and the canvas edge, pixels.
pub const MIN_MARGIN: f64 = 5.0;

/// Average colour of a stained erythrocyte.
pub const DEFAULT_FILL: Rgb = [255, 222, 219];
/// Central pallor, paler than the cell body.
pub const DEFAULT_PALLOR: Rgb = [250, 236, 234];
/// Bright smear background.
pub const DEFAULT_BACKGROUND: Rgb = [248, 248, 248];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("shape needs {needed:.1} px of half-extent plus {MIN_MARGIN} px margin but canvas is {width}x{height}")]
    ShapeOutOfCanvas { needed: f64, width: usize, height: usize },
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeKind {
    /// Filled disk with an optional concentric pallor disk.
    Disk { radius: f64, pallor_radius: Option<f64> },
    /// Thin ring of cell colour around a large pallor.
    Annulus { outer_radius: f64, pallor_radius: f64 },
    /// Axes are semi-axes; `angle_deg` rotates the major axis.
    Ellipse { semi_major: f64, semi_minor: f64, angle_deg: f64 },
    /// Disk minus a second disk shifted by `offset` along `angle_deg`.
    Crescent { radius: f64, bite_radius: f64, offset: f64, angle_deg: f64 },
    /// Disk with evenly spaced triangular spikes; the first points along `angle_deg`.
    Star { radius: f64, spikes: u32, spike_length: f64, spike_half_width: f64, angle_deg: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub fill: Rgb,
    pub pallor: Rgb,
    pub background: Rgb,
    /// Shape centre; `None` centres it on the canvas.
    pub center: Option<(f64, f64)>,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind) -> Self {
        ShapeSpec {
            kind,
            fill: DEFAULT_FILL,
            pallor: DEFAULT_PALLOR,
            background: DEFAULT_BACKGROUND,
            center: None,
        }
    }

    pub fn disk(radius: f64, pallor_radius: Option<f64>) -> Self {
        Self::new(ShapeKind::Disk { radius, pallor_radius })
    }

    pub fn annulus(outer_radius: f64, pallor_radius: f64) -> Self {
        Self::new(ShapeKind::Annulus { outer_radius, pallor_radius })
    }

    pub fn ellipse(semi_major: f64, semi_minor: f64) -> Self {
        Self::new(ShapeKind::Ellipse { semi_major, semi_minor, angle_deg: 0.0 })
    }

    pub fn crescent(radius: f64, bite_radius: f64, offset: f64) -> Self {
        Self::new(ShapeKind::Crescent { radius, bite_radius, offset, angle_deg: 0.0 })
    }

    pub fn star(radius: f64, spikes: u32, spike_length: f64, spike_half_width: f64) -> Self {
        Self::new(ShapeKind::Star { radius, spikes, spike_length, spike_half_width, angle_deg: 90.0 })
    }

    pub fn at(mut self, cx: f64, cy: f64) -> Self {
        self.center = Some((cx, cy));
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SynthError::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match self.kind {
            ShapeKind::Disk { radius, pallor_radius } => {
                positive("radius", radius)?;
                if let Some(p) = pallor_radius {
                    positive("pallor_radius", p)?;
                    if p >= radius {
                        return Err(SynthError::InvalidParameter("pallor_radius must be below radius".into()));
                    }
                }
            }
            ShapeKind::Annulus { outer_radius, pallor_radius } => {
                positive("outer_radius", outer_radius)?;
                positive("pallor_radius", pallor_radius)?;
                if pallor_radius >= outer_radius {
                    return Err(SynthError::InvalidParameter(
                        "pallor_radius must be below outer_radius".into(),
                    ));
                }
            }
            ShapeKind::Ellipse { semi_major, semi_minor, .. } => {
                positive("semi_major", semi_major)?;
                positive("semi_minor", semi_minor)?;
            }
            ShapeKind::Crescent { radius, bite_radius, offset, .. } => {
                positive("radius", radius)?;
                positive("bite_radius", bite_radius)?;
                positive("offset", offset)?;
            }
            ShapeKind::Star { radius, spikes, spike_length, spike_half_width, .. } => {
                positive("radius", radius)?;
                positive("spike_length", spike_length)?;
                positive("spike_half_width", spike_half_width)?;
                if spikes == 0 {
                    return Err(SynthError::InvalidParameter("spikes must be at least 1".into()));
                }
                if spike_half_width >= radius {
                    return Err(SynthError::InvalidParameter(
                        "spike_half_width must be below radius".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Half-extents of the shape's bounding box around its centre.
    fn half_extents(&self) -> (f64, f64) {
        match self.kind {
            ShapeKind::Disk { radius, .. } => (radius, radius),
            ShapeKind::Annulus { outer_radius, .. } => (outer_radius, outer_radius),
            ShapeKind::Ellipse { semi_major: a, semi_minor: b, angle_deg } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                ((a * a * c * c + b * b * s * s).sqrt(), (a * a * s * s + b * b * c * c).sqrt())
            }
            ShapeKind::Crescent { radius, .. } => (radius, radius),
            ShapeKind::Star { radius, spike_length, .. } => {
                (radius + spike_length, radius + spike_length)
            }
        }
    }

    /// Which region covers the point `(dx, dy)` relative to the centre.
    fn region_at(&self, dx: f64, dy: f64) -> Region {
        let r2 = dx * dx + dy * dy;
        match self.kind {
            ShapeKind::Disk { radius, pallor_radius } => {
                if pallor_radius.is_some_and(|p| r2 <= p * p) {
                    Region::Pallor
                } else if r2 <= radius * radius {
                    Region::Cell
                } else {
                    Region::Background
                }
            }
            ShapeKind::Annulus { outer_radius, pallor_radius } => {
                if r2 <= pallor_radius * pallor_radius {
                    Region::Pallor
                } else if r2 <= outer_radius * outer_radius {
                    Region::Cell
                } else {
                    Region::Background
                }
            }
            ShapeKind::Ellipse { semi_major, semi_minor, angle_deg } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let u = (dx * c + dy * s) / semi_major;
                let v = (-dx * s + dy * c) / semi_minor;
                Region::cell_if(u * u + v * v <= 1.0)
            }
            ShapeKind::Crescent { radius, bite_radius, offset, angle_deg } => {
                let (s, c) = angle_deg.to_radians().sin_cos();
                let (bx, by) = (dx - offset * c, dy - offset * s);
                Region::cell_if(r2 <= radius * radius && bx * bx + by * by > bite_radius * bite_radius)
            }
            ShapeKind::Star { radius, spikes, spike_length, spike_half_width, angle_deg } => {
                if r2 <= radius * radius {
                    return Region::Cell;
                }
                // base corners sit on the circle
                let base = (radius * radius - spike_half_width * spike_half_width).sqrt();
                let tip = radius + spike_length;
                let hit = (0..spikes).any(|k| {
                    let phi = (angle_deg + 360.0 * k as f64 / spikes as f64).to_radians();
                    let (s, c) = phi.sin_cos();
                    // spike-local frame: u along the spike axis, v across it
                    let u = dx * c + dy * s;
                    let v = (-dx * s + dy * c).abs();
                    u >= base && u <= tip && v <= spike_half_width * (tip - u) / (tip - base)
                });
                Region::cell_if(hit)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Background,
    Cell,
    Pallor,
}

impl Region {
    fn cell_if(inside: bool) -> Region {
        if inside { Region::Cell } else { Region::Background }
    }
}

pub fn render_shape(spec: &ShapeSpec, width: usize, height: usize) -> Result<RasterImage, SynthError> {
    render_scene(std::slice::from_ref(spec), width, height, spec.background)
}

/// Paints several shapes onto one background. Later shapes overwrite earlier ones.
pub fn render_scene(
    shapes: &[ShapeSpec],
    width: usize,
    height: usize,
    background: Rgb,
) -> Result<RasterImage, SynthError> {
    let mut pixels = vec![background; width * height];
    for spec in shapes {
        let (cx, cy) = placement(spec, width, height)?;
        for (i, px) in pixels.iter_mut().enumerate() {
            let (x, y) = ((i % width) as f64, (i / width) as f64);
            match spec.region_at(x - cx, y - cy) {
                Region::Background => {}
                Region::Cell => *px = spec.fill,
                Region::Pallor => *px = spec.pallor,
            }
        }
    }
    RasterImage::new(width, height, pixels).map_err(|e| SynthError::InvalidParameter(e.to_string()))
}

/// Validated centre of `spec` on a `width`x`height` canvas.
fn placement(spec: &ShapeSpec, width: usize, height: usize) -> Result<(f64, f64), SynthError> {
    spec.validate()?;
    let (cx, cy) = spec.center.unwrap_or((width as f64 / 2.0, height as f64 / 2.0));
    let (hx, hy) = spec.half_extents();
    let fits = cx - hx >= MIN_MARGIN
        && cy - hy >= MIN_MARGIN
        && cx + hx <= width as f64 - 1.0 - MIN_MARGIN
        && cy + hy <= height as f64 - 1.0 - MIN_MARGIN;
    if fits {
        Ok((cx, cy))
    } else {
        Err(SynthError::ShapeOutOfCanvas { needed: hx.max(hy), width, height })
    }
}

/// A shape plus its canvas, as read from a fixture spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthJob {
    pub spec: ShapeSpec,
    pub width: usize,
    pub height: usize,
}

impl SynthJob {
    pub fn render(&self) -> Result<RasterImage, SynthError> {
        render_shape(&self.spec, self.width, self.height)
    }

    /// Parses a `key = value` fixture description, e.g.
    ///
    /// ```text
    /// kind = crescent
    /// width = 100
    /// height = 100
    /// radius = 30
    /// bite_radius = 26
    /// offset = 12
    /// ```
    pub fn parse(text: &str) -> Result<SynthJob, SynthError> {
        let pairs = parse_key_values(text)?;
        let mut fields = std::collections::BTreeMap::new();
        for (line, key, value) in pairs {
            if fields.insert(key.clone(), (line, value)).is_some() {
                return Err(ConfigError::at(line, format!("duplicate key {key:?}")).into());
            }
        }
        let mut take = |key: &str| fields.remove(key);
        let num = |entry: Option<(usize, String)>, key: &str| -> Result<Option<f64>, SynthError> {
            entry
                .map(|(line, v)| {
                    v.parse::<f64>()
                        .map_err(|_| ConfigError::at(line, format!("{key}: expected a number, got {v:?}")).into())
                })
                .transpose()
        };
        let required = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| SynthError::from(ConfigError::new(format!("missing required key {key:?}"))))
        };

        let (kind_line, kind) = take("kind").ok_or_else(|| ConfigError::new("missing required key \"kind\""))?;
        let width = required(num(take("width"), "width")?, "width")?;
        let height = required(num(take("height"), "height")?, "height")?;
        let angle = num(take("angle"), "angle")?;

        let kind = match kind.as_str() {
            "disk" => ShapeKind::Disk {
                radius: required(num(take("radius"), "radius")?, "radius")?,
                pallor_radius: num(take("pallor_radius"), "pallor_radius")?,
            },
            "annulus" => ShapeKind::Annulus {
                outer_radius: required(num(take("outer_radius"), "outer_radius")?, "outer_radius")?,
                pallor_radius: required(num(take("pallor_radius"), "pallor_radius")?, "pallor_radius")?,
            },
            "ellipse" => ShapeKind::Ellipse {
                semi_major: required(num(take("semi_major"), "semi_major")?, "semi_major")?,
                semi_minor: required(num(take("semi_minor"), "semi_minor")?, "semi_minor")?,
                angle_deg: angle.unwrap_or(0.0),
            },
            "crescent" => ShapeKind::Crescent {
                radius: required(num(take("radius"), "radius")?, "radius")?,
                bite_radius: required(num(take("bite_radius"), "bite_radius")?, "bite_radius")?,
                offset: required(num(take("offset"), "offset")?, "offset")?,
                angle_deg: angle.unwrap_or(0.0),
            },
            "star" => {
                let spikes = required(num(take("spikes"), "spikes")?, "spikes")?;
                if spikes.fract() != 0.0 || spikes < 1.0 {
                    return Err(ConfigError::new(format!("spikes must be a positive integer, got {spikes}")).into());
                }
                ShapeKind::Star {
                    radius: required(num(take("radius"), "radius")?, "radius")?,
                    spikes: spikes as u32,
                    spike_length: required(num(take("spike_length"), "spike_length")?, "spike_length")?,
                    spike_half_width: required(
                        num(take("spike_half_width"), "spike_half_width")?,
                        "spike_half_width",
                    )?,
                    angle_deg: angle.unwrap_or(90.0),
                }
            }
            other => return Err(ConfigError::at(kind_line, format!("unknown shape kind {other:?}")).into()),
        };

        let mut spec = ShapeSpec::new(kind);
        for (key, slot) in [("fill", &mut spec.fill), ("pallor", &mut spec.pallor), ("background", &mut spec.background)] {
            if let Some((line, v)) = take(key) {
                *slot = parse_rgb(&v).map_err(|e| ConfigError::at(line, format!("{key}: {e}")))?;
            }
        }
        if let Some((line, v)) = take("center") {
            let parts: Vec<f64> = v
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| ConfigError::at(line, format!("center: expected X,Y, got {v:?}")))?;
            match parts[..] {
                [x, y] => spec.center = Some((x, y)),
                _ => return Err(ConfigError::at(line, format!("center: expected X,Y, got {v:?}")).into()),
            }
        }
        if let Some((key, (line, _))) = fields.into_iter().next() {
            return Err(ConfigError::at(line, format!("unexpected key {key:?} for this shape")).into());
        }
        let dim = |v: f64, name: &str| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(SynthError::from(ConfigError::new(format!("{name} must be a positive integer, got {v}"))))
            }
        };
        Ok(SynthJob { spec, width: dim(width, "width")?, height: dim(height, "height")? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(img: &RasterImage, color: Rgb) -> usize {
        img.pixels().iter().filter(|&&p| p == color).count()
    }

    #[test]
    fn disk_area_is_close_to_analytic() {
        let img = render_shape(&ShapeSpec::disk(38.0, None), 120, 120).unwrap();
        let area = count(&img, DEFAULT_FILL) as f64;
        let exact = std::f64::consts::PI * 38.0 * 38.0;
        assert!((area - exact).abs() / exact < 0.03, "{area} vs {exact}");
    }

    #[test]
    fn annulus_white_fraction() {
        let img = render_shape(&ShapeSpec::annulus(34.0, 20.0), 100, 100).unwrap();
        let white = count(&img, DEFAULT_PALLOR) as f64;
        let cell = white + count(&img, DEFAULT_FILL) as f64;
        let frac = white / cell;
        assert!((frac - 400.0 / 1156.0).abs() < 0.01, "{frac}");
        assert!((0.3326..=0.455).contains(&frac));
    }

    #[test]
    fn rendered_area_converges_with_radius() {
        for r in (20..=60).step_by(5) {
            let r = r as f64;
            let side = (2.0 * r) as usize + 20;
            let img = render_shape(&ShapeSpec::disk(r, None), side, side).unwrap();
            let area = count(&img, DEFAULT_FILL) as f64;
            let exact = std::f64::consts::PI * r * r;
            assert!((area - exact).abs() / exact < 0.03, "r={r}");
        }
    }

    #[test]
    fn shapes_must_fit_with_margin() {
        assert!(matches!(
            render_shape(&ShapeSpec::disk(38.0, None), 80, 80),
            Err(SynthError::ShapeOutOfCanvas { .. })
        ));
        assert!(matches!(
            render_shape(&ShapeSpec::ellipse(52.0, 26.0), 100, 100),
            Err(SynthError::ShapeOutOfCanvas { .. })
        ));
        assert!(render_shape(&ShapeSpec::ellipse(52.0, 26.0), 120, 80).is_ok());
    }

    #[test]
    fn rendering_is_deterministic() {
        let spec = ShapeSpec::star(32.0, 5, 22.0, 9.0);
        assert_eq!(render_shape(&spec, 140, 140).unwrap(), render_shape(&spec, 140, 140).unwrap());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            render_shape(&ShapeSpec::annulus(10.0, 12.0), 60, 60),
            Err(SynthError::InvalidParameter(_))
        ));
        assert!(matches!(
            render_shape(&ShapeSpec::star(20.0, 0, 5.0, 3.0), 80, 80),
            Err(SynthError::InvalidParameter(_))
        ));
    }

    #[test]
    fn parses_fixture_specs() {
        let job = SynthJob::parse(
            "# sickle fixture\nkind = crescent\nwidth = 100\nheight = 90\nradius = 30\nbite_radius = 26\noffset = 12\nfill = 250,210,205\n",
        )
        .unwrap();
        assert_eq!((job.width, job.height), (100, 90));
        assert_eq!(job.spec.fill, [250, 210, 205]);
        assert_eq!(
            job.spec.kind,
            ShapeKind::Crescent { radius: 30.0, bite_radius: 26.0, offset: 12.0, angle_deg: 0.0 }
        );
        let img = job.render().unwrap();
        assert_eq!((img.width(), img.height()), (100, 90));
    }

    #[test]
    fn malformed_specs_report_the_problem() {
        let err = SynthJob::parse("kind = blob\nwidth = 10\nheight = 10").unwrap_err();
        assert!(err.to_string().contains("unknown shape kind"), "{err}");
        let err = SynthJob::parse("kind = disk\nwidth = 10\nheight = 10").unwrap_err();
        assert!(err.to_string().contains("radius"), "{err}");
        let err = SynthJob::parse("kind = disk\nwidth = 10\nheight = 10\nradius = x").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = SynthJob::parse("kind = disk\nwidth = 10\nheight = 10\nradius = 3\nspikes = 4").unwrap_err();
        assert!(err.to_string().contains("unexpected key"), "{err}");
        assert!(SynthJob::parse("just some words").is_err());
    }
}
