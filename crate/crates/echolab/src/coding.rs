//! Elias integer codes, the LZ78 cost surrogate, KT k-gram code lengths and
//! the compression gap PCG = MDL(X) − CMDL(X | C).

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[inline]
fn floor_log2(u: u64) -> u32 {
    63 - u.leading_zeros()
}

pub fn elias_gamma_len(u: u64) -> Result<u32> {
    if u == 0 {
        return Err(invalid("Elias codes are defined for u >= 1"));
    }
    Ok(2 * floor_log2(u) + 1)
}

pub fn elias_delta_len(u: u64) -> Result<u32> {
    if u == 0 {
        return Err(invalid("Elias codes are defined for u >= 1"));
    }
    let n = floor_log2(u);
    Ok(n + 2 * floor_log2(u64::from(n) + 1) + 1)
}

/// Append-only bit buffer, most significant bit first within a codeword.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.bits.push(value >> i & 1 == 1);
        }
    }

    pub fn write_gamma(&mut self, u: u64) -> Result<()> {
        elias_gamma_len(u)?;
        let n = floor_log2(u);
        self.push_bits(0, n);
        self.push_bits(u, n + 1);
        Ok(())
    }

    pub fn write_delta(&mut self, u: u64) -> Result<()> {
        elias_delta_len(u)?;
        let n = floor_log2(u);
        self.write_gamma(u64::from(n) + 1)?;
        self.push_bits(u, n);
        Ok(())
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader {
            bits: &self.bits,
            pos: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.bits.len()
    }

    fn bit(&mut self) -> Result<bool> {
        let b = *self
            .bits
            .get(self.pos)
            .ok_or_else(|| Error::Parse("truncated codeword".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn read_bits(&mut self, width: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | u64::from(self.bit()?);
        }
        Ok(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(Error::Parse("gamma prefix too long".into()));
            }
        }
        Ok(1 << zeros | self.read_bits(zeros)?)
    }

    pub fn read_delta(&mut self) -> Result<u64> {
        let n = self.read_gamma()? - 1;
        if n > 63 {
            return Err(Error::Parse("delta length too large".into()));
        }
        Ok(1 << n | self.read_bits(n as u32)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntCode {
    Gamma,
    Delta,
}

/// Self-delimiting header of nonnegative integers, each coded as a+1.
pub fn header_len(values: &[u64], code: IntCode) -> u64 {
    values
        .iter()
        .map(|&a| {
            let u = a + 1;
            u64::from(match code {
                IntCode::Gamma => elias_gamma_len(u),
                IntCode::Delta => elias_delta_len(u),
            }
            .expect("a+1 is positive"))
        })
        .sum()
}

/// (C0, C1) with header_len ≤ C0·t + C1·Σ log2(a_i + 1).
pub fn header_constants(code: IntCode) -> (f64, f64) {
    match code {
        IntCode::Gamma => (1.0, 2.0),
        IntCode::Delta => (1.0, 3.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerCost {
    /// max(1, ⌈log2 |D|⌉)
    Uniform,
    /// Elias γ length of index + 1
    Vlc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lz78Config {
    pub pointer_cost: PointerCost,
}

impl Lz78Config {
    pub const UNIFORM: Lz78Config = Lz78Config {
        pointer_cost: PointerCost::Uniform,
    };
    pub const VLC: Lz78Config = Lz78Config {
        pointer_cost: PointerCost::Vlc,
    };

    /// Cost of pointing at `index` while the dictionary holds `dict_len`
    /// phrases, the root included.
    pub fn pointer_bits(&self, index: usize, dict_len: usize) -> u64 {
        match self.pointer_cost {
            PointerCost::Uniform => {
                let ceil = usize::BITS - (dict_len.max(1) - 1).leading_zeros();
                u64::from(ceil.max(1))
            }
            PointerCost::Vlc => u64::from(elias_gamma_len(index as u64 + 1).unwrap()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lz78Report {
    pub bits: u64,
    /// Complete phrases plus a trailing partial phrase if one is pending.
    pub phrases: usize,
}

/// LZ78 parse from a dictionary holding only the empty root phrase (index
/// 0). A complete phrase costs a pointer plus one literal bit; a trailing
/// phrase that is already in the dictionary costs its pointer only.
pub fn lz78_parse(x: &[bool], cfg: &Lz78Config) -> Lz78Report {
    let mut children: Vec<[u32; 2]> = vec![[0, 0]];
    let mut node = 0usize;
    let mut bits = 0u64;
    let mut phrases = 0usize;
    for &b in x {
        let child = children[node][usize::from(b)];
        if child != 0 {
            node = child as usize;
            continue;
        }
        bits += cfg.pointer_bits(node, children.len()) + 1;
        phrases += 1;
        let idx = children.len() as u32;
        children[node][usize::from(b)] = idx;
        children.push([0, 0]);
        node = 0;
    }
    if node != 0 {
        bits += cfg.pointer_bits(node, children.len());
        phrases += 1;
    }
    Lz78Report { bits, phrases }
}

pub fn lz78_cost(x: &[bool], cfg: &Lz78Config) -> u64 {
    lz78_parse(x, cfg).bits
}

pub const MAX_KGRAM_ORDER: usize = 24;

/// Sequential KT code length in bits; the context of x_t is the previous
/// min(t, k) symbols.
pub fn kgram_code_len(x: &[bool], k: usize) -> Result<f64> {
    if k > MAX_KGRAM_ORDER {
        return Err(Error::SizeExceeded {
            got: k,
            limit: MAX_KGRAM_ORDER,
        });
    }
    // context key: a leading 1 marks the history length
    let mut counts = vec![[0u32; 2]; 1 << (k + 1)];
    let mask = (1u64 << k) - 1;
    let mut hist = 0u64;
    let mut bits = 0.0;
    for (t, &b) in x.iter().enumerate() {
        let len = t.min(k);
        let key = (1u64 << len | (hist & ((1u64 << len) - 1))) as usize;
        let c = &mut counts[key];
        let hit = c[usize::from(b)] as f64 + 0.5;
        let tot = (c[0] + c[1]) as f64 + 1.0;
        bits -= (hit / tot).log2();
        c[usize::from(b)] += 1;
        hist = (hist << 1 | u64::from(b)) & mask;
    }
    Ok(bits)
}

/// Average bits per symbol; zero for an empty stream.
pub fn kgram_logloss(x: &[bool], k: usize) -> Result<f64> {
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(kgram_code_len(x, k)? / x.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Kgram(usize),
    Lz(Lz78Config),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Kgram(_) => "kgram",
            Model::Lz(c) => match c.pointer_cost {
                PointerCost::Uniform => "lz78",
                PointerCost::Vlc => "lz78-vlc",
            },
        }
    }

    pub fn code_len(&self, x: &[bool]) -> Result<f64> {
        match self {
            Model::Kgram(k) => kgram_code_len(x, *k),
            Model::Lz(cfg) => Ok(lz78_cost(x, cfg) as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContextMode {
    #[serde(rename = "label-block")]
    LabelBlock,
    #[serde(rename = "side")]
    Side,
}

impl ContextMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContextMode::LabelBlock => "label-block",
            ContextMode::Side => "side",
        }
    }
}

impl FromStr for ContextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "label-block" | "label" => Ok(ContextMode::LabelBlock),
            "side" => Ok(ContextMode::Side),
            _ => Err(invalid(format!("unknown context mode {s:?}"))),
        }
    }
}

/// Hard floor on coded stream length per k-gram order: L ≥ MIN_LEN_RATIO·2^k.
pub const MIN_LEN_RATIO: f64 = 4.0;

/// Thin-context guard for k-gram models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGuard {
    pub warn_ratio: f64,
    pub auto_clamp: bool,
}

impl Default for KGuard {
    fn default() -> Self {
        KGuard {
            warn_ratio: 16.0,
            auto_clamp: false,
        }
    }
}

impl KGuard {
    pub fn is_thin(&self, len: usize, k: usize) -> bool {
        (len as f64) < self.warn_ratio * (1u64 << k) as f64
    }

    /// Order actually used for a stream of `len` symbols; lowered only when
    /// auto-clamping is on.
    pub fn effective_k(&self, len: usize, k: usize) -> usize {
        if !self.is_thin(len, k) {
            return k;
        }
        log::warn!(
            "thin contexts: L={len}, 2^k={}, ratio below {}",
            1u64 << k,
            self.warn_ratio
        );
        if !self.auto_clamp {
            return k;
        }
        let mut k = k;
        while k > 0 && self.is_thin(len, k) {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PcgResult {
    pub mdl_bits: f64,
    pub cmdl_bits: f64,
    pub pcg_bits: f64,
    /// PCG was negative and got clamped to zero.
    pub clamped: bool,
    /// Order used after the thin-context guard (k-gram only).
    pub k_used: Option<usize>,
}

/// Label mode splits x by label value and sums the per-label code lengths
/// (no cost for the label stream). Side mode codes the residual x ⊕ s.
pub fn pcg(
    x: &[bool],
    ctx: &[bool],
    mode: ContextMode,
    model: Model,
    clamp: bool,
    guard: &KGuard,
) -> Result<PcgResult> {
    if x.len() != ctx.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: ctx.len(),
        });
    }
    let streams: Vec<Vec<bool>> = match mode {
        ContextMode::LabelBlock => {
            let mut s0 = Vec::new();
            let mut s1 = Vec::new();
            for (&b, &c) in x.iter().zip(ctx) {
                if c {
                    s1.push(b);
                } else {
                    s0.push(b);
                }
            }
            vec![s0, s1]
        }
        ContextMode::Side => vec![x.iter().zip(ctx).map(|(a, b)| a ^ b).collect()],
    };
    let (model, k_used) = match model {
        Model::Kgram(k) => {
            let shortest = streams
                .iter()
                .map(Vec::len)
                .filter(|&l| l > 0)
                .min()
                .unwrap_or(x.len());
            let shortest = shortest.min(x.len());
            let k = guard.effective_k(shortest, k);
            if (shortest as f64) < MIN_LEN_RATIO * (1u64 << k.min(63)) as f64 {
                return Err(Error::InsufficientData(format!(
                    "coded stream of {shortest} symbols is below {MIN_LEN_RATIO}·2^{k}"
                )));
            }
            (Model::Kgram(k), Some(k))
        }
        m => (m, None),
    };
    let mdl = model.code_len(x)?;
    let mut cmdl = 0.0;
    for s in &streams {
        cmdl += model.code_len(s)?;
    }
    let raw = mdl - cmdl;
    let clamped = clamp && raw < 0.0;
    Ok(PcgResult {
        mdl_bits: mdl,
        cmdl_bits: cmdl,
        pcg_bits: if clamped { 0.0 } else { raw },
        clamped,
        k_used,
    })
}

/// Reference LZ78 parser keyed by phrase strings.
#[doc(hidden)]
pub fn lz78_reference(x: &[bool], cfg: &Lz78Config) -> u64 {
    let mut dict: HashMap<Vec<bool>, usize> = HashMap::new();
    dict.insert(Vec::new(), 0);
    let mut cur: Vec<bool> = Vec::new();
    let mut bits = 0;
    for &b in x {
        cur.push(b);
        if dict.contains_key(&cur) {
            continue;
        }
        let prefix = &cur[..cur.len() - 1];
        let idx = dict[prefix];
        bits += cfg.pointer_bits(idx, dict.len()) + 1;
        let next = dict.len();
        dict.insert(std::mem::take(&mut cur), next);
    }
    if !cur.is_empty() {
        bits += cfg.pointer_bits(dict[&cur], dict.len());
    }
    bits
}
