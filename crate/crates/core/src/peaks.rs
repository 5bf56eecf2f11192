//! Peak finding on sampled spectra.

use crate::model::Spectrum;

/// Indices of strict interior local maxima. A flat top counts once, at the
/// middle of the plateau.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                peaks.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Detunings of the local maxima of a spectrum.
pub fn peak_positions(spectrum: &Spectrum) -> Vec<f64> {
    local_maxima(&spectrum.values)
        .into_iter()
        .map(|j| spectrum.grid.point(j))
        .collect()
}

/// Full width at half maximum of the peak at `index`, with the half-height
/// crossings found by linear interpolation. None if a crossing lies off the
/// grid.
pub fn fwhm(spectrum: &Spectrum, index: usize) -> Option<f64> {
    let v = &spectrum.values;
    let half = v[index] / 2.0;
    let cross = |a: usize, b: usize| {
        let (xa, xb) = (spectrum.grid.point(a), spectrum.grid.point(b));
        xa + (half - v[a]) / (v[b] - v[a]) * (xb - xa)
    };
    let mut left = index;
    while v[left] > half {
        left = left.checked_sub(1)?;
    }
    let mut right = index;
    while v[right] > half {
        right += 1;
        if right == v.len() {
            return None;
        }
    }
    Some(cross(right - 1, right) - cross(left, left + 1))
}

/// Index of the grid point closest to `delta`.
pub fn nearest_index(spectrum: &Spectrum, delta: f64) -> usize {
    let g = &spectrum.grid;
    let j = ((delta - g.delta_min()) / g.step()).round();
    j.clamp(0.0, (g.len() - 1) as f64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Channel, SpectrumGrid};

    #[test]
    fn maxima_and_plateaus() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 2.0, 1.0]), vec![1, 4]);
        assert_eq!(local_maxima(&[3.0, 2.0, 1.0]), Vec::<usize>::new());
        assert_eq!(local_maxima(&[1.0, 2.0, 2.0]), Vec::<usize>::new());
        assert_eq!(local_maxima(&[]), Vec::<usize>::new());
    }

    #[test]
    fn lorentzian_width() {
        let grid = SpectrumGrid::default();
        let values = grid.points().map(|x| 1.0 / (x * x + 0.25)).collect();
        let s = Spectrum::new(grid, values, Channel::S2);
        let peaks = local_maxima(&s.values);
        assert_eq!(peaks, vec![1000]);
        assert!((fwhm(&s, 1000).unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(nearest_index(&s, 0.004), 1000);
    }
}
