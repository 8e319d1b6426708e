use rand::Rng;

use crate::csp::{Assignment, CspInstance};
use crate::error::{Error, Result};

/// Bit width of the field encoding a domain of `d` values.
pub fn field_width(d: usize) -> usize {
    let mut width = 0;
    while (1usize << width) < d {
        width += 1;
    }
    width.max(1)
}

/// Per-variable bit fields laid out back to back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    offsets: Vec<usize>,
    widths: Vec<usize>,
    sizes: Vec<usize>,
}

impl Layout {
    pub fn for_instance(inst: &CspInstance) -> Self {
        let sizes: Vec<usize> = inst.domains().iter().map(|d| d.len()).collect();
        let widths: Vec<usize> = sizes.iter().map(|&d| field_width(d)).collect();
        let offsets = widths
            .iter()
            .scan(0, |acc, w| {
                let at = *acc;
                *acc += w;
                Some(at)
            })
            .collect();
        Layout { offsets, widths, sizes }
    }

    pub fn total_bits(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn num_vars(&self) -> usize {
        self.widths.len()
    }

    /// Domain index encoded for `var`: the field read MSB-first, modulo the
    /// domain size.
    #[inline]
    pub fn index_of(&self, bits: &[bool], var: usize) -> usize {
        let field = &bits[self.offsets[var]..self.offsets[var] + self.widths[var]];
        let k = field.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        k % self.sizes[var]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub bits: Vec<bool>,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Chromosome { bits: vec![false; len] }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Chromosome { bits: (0..len).map(|_| rng.gen_bool(0.5)).collect() }
    }

    /// Parses a string of '0'/'1' characters.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit '{other}'"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(|bits| Chromosome { bits })
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Total assignment encoded by `ch`.
pub fn decode(ch: &Chromosome, inst: &CspInstance) -> Result<Assignment> {
    let layout = Layout::for_instance(inst);
    if ch.len() != layout.total_bits() {
        return Err(Error::Contract(format!(
            "chromosome has {} bits, layout needs {}",
            ch.len(),
            layout.total_bits()
        )));
    }
    let indices: Vec<usize> = (0..inst.num_vars()).map(|v| layout.index_of(&ch.bits, v)).collect();
    Ok(inst.from_indices(&indices))
}

/// Child = prefix of `a` up to `cut` followed by the suffix of `b`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, cut: usize) -> Chromosome {
    let mut bits = a.bits[..cut].to_vec();
    bits.extend_from_slice(&b.bits[cut..]);
    Chromosome { bits }
}

/// One-point crossover producing a single child. With probability `rate` the
/// cut is drawn uniformly from `1..len`; otherwise the child copies `a`.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    rate: f64,
    rng: &mut R,
) -> Result<Chromosome> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("parent lengths differ: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 || !rng.gen_bool(rate) {
        return Ok(a.clone());
    }
    let cut = rng.gen_range(1..a.len());
    Ok(crossover_at(a, b, cut))
}

/// Flips each bit independently with probability `rate`.
pub fn bit_mutation<R: Rng + ?Sized>(ch: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    Chromosome { bits: ch.bits.iter().map(|&b| b ^ rng.gen_bool(rate)).collect() }
}
