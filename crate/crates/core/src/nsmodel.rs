//! Explicit Néron–Severi lattice models built from elliptic fibrations
//! with section: `U ⊕ A_r ⊕ ⟨-2c₀⟩` and friends, divisor intersection
//! calculus, Picard–Lefschetz reflections with a straightening loop, the
//! quasi-ampleness criterion, witness generators for the realizable
//! degree ranges, and the index-3 overlattice of `A₁₇`.
//!
//! Basis order is always `F, O, Θ-blocks, v`: the fibre class, the zero
//! section (`F² = 0`, `F·O = 1`, `O² = -2`), one chain of `(-2)`-classes
//! per `A_r` summand, and optionally an orthogonal class of square
//! `-2c₀`. The identity component `Θ₀ := F - ΣΘᵢ` closes each chain into
//! the cycle of an `I_{r+1}` fibre.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith;
use crate::exact::{BigRat, SymmetricForm};
use crate::{Error, Result};

/// An integer divisor class in the coordinates of a model basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| a * k).collect())
    }
}

/// A lattice of the shape `U ⊕ (⊕ᵢ A_{rᵢ}) ⊕ ⟨-2c₀⟩` (the last summand
/// optional), with named basis classes.
#[derive(Clone, Debug)]
pub struct NSModel {
    gram: Vec<Vec<i64>>,
    /// `(offset, rank)` of each `A_r` chain in the basis.
    blocks: Vec<(usize, usize)>,
    v_index: Option<usize>,
    c0: Option<i64>,
}

impl NSModel {
    /// `U ⊕ A_r ⊕ ⟨-2c₀⟩` with `1 <= r <= 17` and `c₀ >= 2`.
    pub fn standard(r: usize, c0: i64) -> Result<NSModel> {
        if !(1..=17).contains(&r) {
            return Err(Error::InvalidInput(format!("r = {r} out of range 1..=17")));
        }
        if c0 < 2 {
            return Err(Error::InvalidInput(format!("c0 = {c0} must be >= 2")));
        }
        Ok(Self::build(&[r], Some(c0)))
    }

    /// `U ⊕ A_{r₁} ⊕ … ⊕ A_{r_k}`, the trivial lattice of an elliptic
    /// fibration with reducible fibres `I_{rᵢ+1}`.
    pub fn with_fibres(ranks: &[usize]) -> Result<NSModel> {
        if ranks.iter().any(|&r| r == 0) {
            return Err(Error::InvalidInput("fibre ranks must be >= 1".into()));
        }
        Ok(Self::build(ranks, None))
    }

    fn build(ranks: &[usize], c0: Option<i64>) -> NSModel {
        let total: usize = ranks.iter().sum();
        let dim = 2 + total + usize::from(c0.is_some());
        let mut gram = vec![vec![0i64; dim]; dim];
        gram[0][1] = 1;
        gram[1][0] = 1;
        gram[1][1] = -2;
        let mut offset = 2;
        let mut blocks = Vec::new();
        for &r in ranks {
            for i in 0..r {
                gram[offset + i][offset + i] = -2;
                if i + 1 < r {
                    gram[offset + i][offset + i + 1] = 1;
                    gram[offset + i + 1][offset + i] = 1;
                }
            }
            blocks.push((offset, r));
            offset += r;
        }
        let v_index = c0.map(|c| {
            gram[offset][offset] = -2 * c;
            offset
        });
        NSModel {
            gram,
            blocks,
            v_index,
            c0,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn c0(&self) -> Option<i64> {
        self.c0
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn symmetric_form(&self) -> SymmetricForm {
        SymmetricForm::from_rows(&self.gram).expect("model Gram is symmetric")
    }

    fn basis(&self, k: usize) -> DivisorClass {
        let mut c = vec![0i64; self.dim()];
        c[k] = 1;
        DivisorClass(c)
    }

    /// The general fibre class `F`.
    pub fn f_class(&self) -> DivisorClass {
        self.basis(0)
    }

    /// The zero section `O`.
    pub fn o_class(&self) -> DivisorClass {
        self.basis(1)
    }

    /// Chain component `Θᵢ` (`1 <= i <= r`) of the given fibre block.
    pub fn theta(&self, block: usize, i: usize) -> Result<DivisorClass> {
        let (offset, r) = *self
            .blocks
            .get(block)
            .ok_or_else(|| Error::InvalidInput(format!("no fibre block {block}")))?;
        if !(1..=r).contains(&i) {
            return Err(Error::InvalidInput(format!(
                "component index {i} out of range 1..={r}"
            )));
        }
        Ok(self.basis(offset + i - 1))
    }

    /// Identity component `Θ₀ = F - Θ₁ - … - Θ_r` of the given block.
    pub fn theta0(&self, block: usize) -> Result<DivisorClass> {
        let (offset, r) = *self
            .blocks
            .get(block)
            .ok_or_else(|| Error::InvalidInput(format!("no fibre block {block}")))?;
        let mut c = vec![0i64; self.dim()];
        c[0] = 1;
        for i in 0..r {
            c[offset + i] = -1;
        }
        Ok(DivisorClass(c))
    }

    /// The orthogonal class `v` of square `-2c₀`.
    pub fn v_class(&self) -> Result<DivisorClass> {
        self.v_index
            .map(|k| self.basis(k))
            .ok_or_else(|| Error::InvalidInput("model has no ⟨-2c0⟩ summand".into()))
    }

    /// The section class `P = v + O + c₀·F`.
    pub fn p_class(&self) -> Result<DivisorClass> {
        let c0 = self
            .c0
            .ok_or_else(|| Error::InvalidInput("model has no ⟨-2c0⟩ summand".into()))?;
        Ok(self
            .v_class()?
            .add(&self.o_class())
            .add(&self.f_class().scale(c0)))
    }

    /// All simple fibre-chain roots `Θᵢ`, block by block.
    pub fn fibre_roots(&self) -> Vec<DivisorClass> {
        let mut roots = Vec::new();
        for (b, &(_, r)) in self.blocks.iter().enumerate() {
            for i in 1..=r {
                roots.push(self.theta(b, i).expect("in range"));
            }
        }
        roots
    }

    pub fn intersect(&self, x: &DivisorClass, y: &DivisorClass) -> Result<i64> {
        let n = self.dim();
        if x.0.len() != n || y.0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.0.len().max(y.0.len()),
            });
        }
        let mut acc: i128 = 0;
        for i in 0..n {
            if x.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                if self.gram[i][j] == 0 || y.0[j] == 0 {
                    continue;
                }
                acc += x.0[i] as i128 * self.gram[i][j] as i128 * y.0[j] as i128;
            }
        }
        i64::try_from(acc).map_err(|_| Error::Overflow)
    }

    pub fn square(&self, x: &DivisorClass) -> Result<i64> {
        self.intersect(x, x)
    }

    /// Picard–Lefschetz reflection `x ↦ x + (x·root)·root` in a
    /// `(-2)`-class.
    pub fn reflect(&self, x: &DivisorClass, root: &DivisorClass) -> Result<DivisorClass> {
        let rs = self.square(root)?;
        if rs != -2 {
            return Err(Error::RootSquareNotMinusTwo(rs));
        }
        let k = self.intersect(x, root)?;
        Ok(x.add(&root.scale(k)))
    }

    /// Reflect `x` in the lowest-index root with `x·Θ < 0` until none is
    /// left.
    ///
    /// The roots span a finite (negative definite) root system, so the
    /// Weyl orbit of `x` is finite; each step strictly decreases the
    /// pairing against any reference vector positive on all roots, hence
    /// the loop terminates.
    pub fn straighten(
        &self,
        x: &DivisorClass,
        roots: &[DivisorClass],
    ) -> Result<(DivisorClass, u64)> {
        let mut current = x.clone();
        let mut steps = 0u64;
        let cap = 1_000_000u64;
        loop {
            let mut reflected = false;
            for root in roots {
                if self.intersect(&current, root)? < 0 {
                    current = self.reflect(&current, root)?;
                    steps += 1;
                    reflected = true;
                    break;
                }
            }
            if !reflected {
                return Ok((current, steps));
            }
            if steps > cap {
                return Err(Error::InvalidInput(
                    "straightening failed to terminate; roots are not negative definite".into(),
                ));
            }
        }
    }
}

/// One named check of a report; `value` is the computed integer quantity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: i64,
    pub pass: bool,
}

fn check(name: impl Into<String>, value: i64, pass: bool) -> Check {
    Check {
        name: name.into(),
        value,
        pass,
    }
}

/// Report of the quasi-ampleness criterion for `H = N·F + d·O + v` on
/// `U ⊕ A_r ⊕ ⟨-2c₀⟩`; every inequality is evaluated through the
/// intersection pairing. The report passes iff `N > max(2d, c₀+1)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct QuasiAmpleReport {
    pub r: usize,
    pub c0: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub d: i64,
    #[serde(rename = "H2")]
    pub h_square: i64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn quasi_ample_check(r: usize, c0: i64, n: i64, d: i64) -> Result<QuasiAmpleReport> {
    if d < 3 {
        return Err(Error::InvalidInput(format!(
            "d = {d} < 3: the fibre degree H.F = d must be at least 3"
        )));
    }
    let model = NSModel::standard(r, c0)?;
    let h = model
        .f_class()
        .scale(n)
        .add(&model.o_class().scale(d))
        .add(&model.v_class()?);
    let h2 = model.square(&h)?;
    let p = model.p_class()?;

    let mut checks = Vec::new();
    let ho = model.intersect(&h, &model.o_class())?;
    checks.push(check("H.O = N - 2d > 0", ho, ho > 0));
    let hp = model.intersect(&h, &p)?;
    checks.push(check("H.P > 0", hp, hp > 0));
    let hf = model.intersect(&h, &model.f_class())?;
    checks.push(check("H.F = d >= 3", hf, hf == d && d >= 3));
    let ht0 = model.intersect(&h, &model.theta0(0)?)?;
    checks.push(check("H.Theta0 = d >= 3", ht0, ht0 == d && d >= 3));
    let mut chain_sum = 0i64;
    let mut chain_ok = true;
    for i in 1..=r {
        let hi = model.intersect(&h, &model.theta(0, i)?)?;
        chain_sum += hi.abs();
        chain_ok &= hi == 0;
    }
    checks.push(check("H.Theta_i = 0 for 1 <= i <= r", chain_sum, chain_ok));
    let floor1 = n - c0;
    checks.push(check(
        "rational multisection floor N - c0 > 0",
        floor1,
        floor1 > 0,
    ));
    checks.push(check(
        "genus-one multisection floor 2(N - c0) > 2",
        2 * floor1,
        2 * floor1 > 2,
    ));
    checks.push(check("H^2 >= 4", h2, h2 >= 4));
    let gcd = h.0.iter().fold(0i64, |g, &x| gcd_i64(g, x));
    checks.push(check(
        "H^2 = 8 implies H not 2-divisible",
        gcd,
        h2 != 8 || gcd % 2 != 0,
    ));

    let pass = checks.iter().all(|c| c.pass);
    Ok(QuasiAmpleReport {
        r,
        c0,
        n,
        d,
        h_square: h2,
        checks,
        pass,
    })
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Counted multiplicative fibres `count × I_n`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FibreCount {
    pub n: u32,
    pub count: u32,
}

/// Witness record for the characteristic-zero construction: degrees `2h` with
/// `h >= d² - 1` are realized on `U ⊕ A_r ⊕ ⟨-2c₀⟩` with the unique
/// `c₀ ∈ {2, …, d+1}` congruent to `-h` mod `d` and `N = (h + c₀)/d + d`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct WitnessIii {
    pub schema_version: u32,
    pub kind: String,
    pub d: i64,
    pub h: i64,
    pub r: usize,
    pub c0: i64,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "H2")]
    pub h_square: i64,
    pub r0: usize,
    #[serde(rename = "rdLower")]
    pub rd_lower: usize,
    pub fibres: Vec<FibreCount>,
    pub euler: u32,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn witness_iii(d: i64, h: i64, r: usize) -> Result<WitnessIii> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("d = {d} must be >= 3")));
    }
    if h < d * d - 1 {
        return Err(Error::InvalidInput(format!(
            "h = {h} below the floor d^2 - 1 = {}",
            d * d - 1
        )));
    }
    if !(1..=17).contains(&r) {
        return Err(Error::InvalidInput(format!("r = {r} out of range 1..=17")));
    }
    let c0 = (2..=d + 1)
        .find(|c| (h + c) % d == 0)
        .expect("a full residue system contains -h mod d");
    let n = (h + c0) / d + d;

    let report = quasi_ample_check(r, c0, n, d)?;
    let model = NSModel::standard(r, c0)?;
    let h_class = model
        .f_class()
        .scale(n)
        .add(&model.o_class().scale(d))
        .add(&model.v_class()?);
    let h2 = model.square(&h_class)?;

    let mut checks = report.checks;
    checks.push(check("H^2 = 2h", h2, h2 == 2 * h));
    // v = P - O - c0 F and back.
    let p = model.p_class()?;
    let v_back = p
        .add(&model.o_class().scale(-1))
        .add(&model.f_class().scale(-c0));
    checks.push(check("v = P - O - c0 F", 0, v_back == model.v_class()?));
    let euler = (r as u32 + 1) + (23 - r as u32);
    checks.push(check("Euler count = 24", euler as i64, euler == 24));
    let pass = checks.iter().all(|c| c.pass);

    Ok(WitnessIii {
        schema_version: 1,
        kind: "witness-iii".into(),
        d,
        h,
        r,
        c0,
        n,
        h_square: h2,
        r0: r,
        rd_lower: 24 - r,
        fibres: vec![
            FibreCount {
                n: r as u32 + 1,
                count: 1,
            },
            FibreCount {
                n: 1,
                count: 23 - r as u32,
            },
        ],
        euler,
        checks,
        pass,
    })
}

/// Witness record for the unconditional construction: `h >= 2d² + d + 1`
/// realized as `H₀ = N·F + D₀` with `h = Nd + d - c₀`, `c₀ ∈ {0, …, d-1}`,
/// a four-square decomposition of `c₀` and an admissible split of `r`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct WitnessUnconditional {
    pub schema_version: u32,
    pub kind: String,
    pub d: i64,
    pub h: i64,
    pub p: u64,
    pub r: u32,
    pub c0: i64,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "fourSquares")]
    pub four_squares: [u64; 4],
    #[serde(rename = "rSplit")]
    pub r_split: [u32; 3],
    #[serde(rename = "H2")]
    pub h_square: i64,
    /// Orthogonal summands of the embedded lattice
    /// `[[0,d],[d,-2c0]] ⊕ A_{r1} ⊕ A_{r2} ⊕ A_{r3}`.
    pub embedding: Vec<String>,
    #[serde(rename = "embeddingDet")]
    pub embedding_det: String,
    pub fibres: Vec<FibreCount>,
    pub r0: u32,
    #[serde(rename = "rdLower")]
    pub rd_lower: u32,
    #[serde(rename = "straighteningSteps")]
    pub straightening_steps: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn witness_unconditional(d: i64, h: i64, p: u64, r: u32) -> Result<WitnessUnconditional> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("d = {d} must be >= 3")));
    }
    if h < 2 * d * d + d + 1 {
        return Err(Error::InvalidInput(format!(
            "h = {h} below the floor 2d^2 + d + 1 = {}",
            2 * d * d + d + 1
        )));
    }
    if p == 2 || !arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let r_cap = if p % 4 == 1 { 14 } else { 13 };
    if !(1..=r_cap).contains(&r) {
        return Err(Error::InvalidInput(format!(
            "r = {r} out of range 1..={r_cap} for p = {p} = {} mod 4",
            p % 4
        )));
    }

    // h = Nd + d - c0 determines c0 in {0, …, d-1} and then N.
    let c0 = (-h).rem_euclid(d);
    let n = (h + c0) / d - 1;
    if n < 2 * d {
        return Err(Error::InvalidInput(format!(
            "no valid (N, c0): N = {n} < 2d = {}",
            2 * d
        )));
    }
    let (a1, a2, a3, a4) = arith::four_squares(c0 as u64);
    let split = arith::r_split(r, p)?
        .ok_or_else(|| Error::InvalidInput(format!("no valid r-split for r = {r}, p = {p}")))?;

    let h0_square_formula = 2 * n * d + 2 * d - 2 * c0;

    // Straightening demonstration in the terminal trivial lattice
    // U ⊕ A₇² ⊕ A₁⁴ (fibres 2×I₈ + 4×I₂): set
    // D = d(F + O) + a₁Θ⁽¹⁾ + … + a₄Θ⁽⁴⁾ on the four I₂ components and
    // straighten D + F against all fibre roots.
    let model = NSModel::with_fibres(&[7, 7, 1, 1, 1, 1])?;
    let mut divisor = model.f_class().add(&model.o_class()).scale(d);
    for (k, a) in [a1, a2, a3, a4].iter().enumerate() {
        divisor = divisor.add(&model.theta(2 + k, 1)?.scale(*a as i64));
    }
    let d_plus_f = divisor.add(&model.f_class());
    let roots = model.fibre_roots();
    let (d0, steps) = model.straighten(&d_plus_f, &roots)?;
    let h0 = model.f_class().scale(n).add(&d0);

    let mut checks = Vec::new();
    let dsq = model.square(&divisor)?;
    checks.push(check("D^2 = -2c0", dsq, dsq == -2 * c0));
    let df = model.intersect(&divisor, &model.f_class())?;
    checks.push(check("D.F = d", df, df == d));
    let d0sq = model.square(&d0)?;
    checks.push(check("D0^2 = 2(d - c0)", d0sq, d0sq == 2 * (d - c0)));
    let d0f = model.intersect(&d0, &model.f_class())?;
    checks.push(check("D0.F = d >= 3", d0f, d0f == d && d >= 3));
    let mut nonneg = true;
    let mut min_pair = i64::MAX;
    for root in &roots {
        let v = model.intersect(&d0, root)?;
        min_pair = min_pair.min(v);
        nonneg &= v >= 0;
    }
    checks.push(check("D0.Theta >= 0 for all fibre roots", min_pair, nonneg));
    let h0sq = model.square(&h0)?;
    checks.push(check(
        "H0^2 = 2Nd + 2d - 2c0",
        h0sq,
        h0sq == h0_square_formula,
    ));
    checks.push(check("H0^2 = 2h", h0sq, h0sq == 2 * h));
    checks.push(check("H0^2 >= 4d^2 + 2", h0sq, h0sq >= 4 * d * d + 2));
    let h0f = model.intersect(&h0, &model.f_class())?;
    checks.push(check("H0.F = d >= 3", h0f, h0f == d && d >= 3));
    let sq_sum = (a1 * a1 + a2 * a2 + a3 * a3 + a4 * a4) as i64;
    checks.push(check("four squares sum to c0", sq_sum, sq_sum == c0));
    checks.push(check(
        "r-split sums to r",
        (split.0 + split.1 + split.2) as i64,
        split.0 + split.1 + split.2 == r,
    ));

    // The embedded lattice [[0,d],[d,-2c0]] ⊕ A_{r1} ⊕ A_{r2} ⊕ A_{r3}.
    let mut embedding_form = SymmetricForm::from_rows(&[vec![0, d], vec![d, -2 * c0]])?;
    let mut embedding = vec![format!("[[0,{d}],[{d},{}]]", -2 * c0)];
    for ri in [split.0, split.1, split.2] {
        if ri > 0 {
            embedding_form = embedding_form.direct_sum(&crate::dynkin::DynkinType::A(ri).gram()?);
            embedding.push(format!("A{ri}"));
        }
    }
    let embedding_det = embedding_form.determinant().to_string();

    // Fibre configuration after deformation: I_{ri+1} for each nonzero
    // part, everything else I₁ (Euler count 24).
    let mut fibres = Vec::new();
    let mut used = 0u32;
    for ri in [split.0, split.1, split.2] {
        if ri > 0 {
            fibres.push(FibreCount { n: ri + 1, count: 1 });
            used += ri + 1;
        }
    }
    fibres.push(FibreCount {
        n: 1,
        count: 24 - used,
    });

    let pass = checks.iter().all(|c| c.pass);
    Ok(WitnessUnconditional {
        schema_version: 1,
        kind: "witness-unconditional".into(),
        d,
        h,
        p,
        r,
        c0,
        n,
        four_squares: [a1, a2, a3, a4],
        r_split: [split.0, split.1, split.2],
        h_square: h0sq,
        embedding,
        embedding_det,
        fibres,
        r0: r,
        rd_lower: 24 - r,
        straightening_steps: steps,
        checks,
        pass,
    })
}

/// Cross-checks of the closed intersection formulas against the bilinear
/// pairing, the two independent computation routes for a witness.
pub fn witness_iii_formula_cross_checks(w: &WitnessIii) -> Result<Vec<Check>> {
    let model = NSModel::standard(w.r, w.c0)?;
    let h = model
        .f_class()
        .scale(w.n)
        .add(&model.o_class().scale(w.d))
        .add(&model.v_class()?);
    let p = model.p_class()?;
    let (n, d, c0) = (w.n, w.d, w.c0);
    let pairs = [
        ("H.O == N - 2d", model.intersect(&h, &model.o_class())?, n - 2 * d),
        (
            "H.P == N - 2c0 + (c0 - 2)d",
            model.intersect(&h, &p)?,
            n - 2 * c0 + (c0 - 2) * d,
        ),
        ("H.F == d", model.intersect(&h, &model.f_class())?, d),
        ("H.Theta0 == d", model.intersect(&h, &model.theta0(0)?)?, d),
        ("H^2 == 2d(N - d) - 2c0", model.square(&h)?, 2 * d * (n - d) - 2 * c0),
        ("P.O == c0 - 2", model.intersect(&p, &model.o_class())?, c0 - 2),
    ];
    Ok(pairs
        .into_iter()
        .map(|(name, lattice, formula)| check(format!("{name} [{formula}]"), lattice, lattice == formula))
        .collect())
}

/// The index-3 overlattice `A₁₇' = A₁₇ + Z·w` glued by a dual vector of
/// square `-4`, inside `U ⊕ A₁₇ ⊕ ⟨-2c₀⟩`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct OverlatticeA17 {
    pub schema_version: u32,
    pub c0: i64,
    #[serde(rename = "detBefore")]
    pub det_before: String,
    #[serde(rename = "detAfter")]
    pub det_after: String,
    #[serde(rename = "dropFactor")]
    pub drop_factor: String,
    #[serde(rename = "wSquare")]
    pub w_square: i64,
    #[serde(rename = "glueTripleIntegral")]
    pub glue_triple_integral: bool,
    #[serde(rename = "a17PrimeDet")]
    pub a17_prime_det: String,
    #[serde(rename = "a17PrimeDiscriminantOrder")]
    pub a17_prime_discriminant_order: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn overlattice_a17(c0: i64) -> Result<OverlatticeA17> {
    if c0 < 2 {
        return Err(Error::InvalidInput(format!("c0 = {c0} must be >= 2")));
    }
    let u = SymmetricForm::from_rows(&[vec![0, 1], vec![1, 0]])?;
    let a17 = crate::dynkin::DynkinType::A(17).gram()?;
    let rank1 = SymmetricForm::from_rows(&[vec![-2 * c0]])?;
    let before = u.direct_sum(&a17).direct_sum(&rank1);
    let det_before = before.determinant();

    // w in the dual of A₁₇ with w·Θ₆ = 1 and w·Θⱼ = 0 otherwise: the glue
    // vector of an order-3 element, of square -4.
    let mut rhs = vec![BigInt::zero(); 17];
    rhs[5] = BigInt::from(1);
    let w = a17.solve(&rhs)?.expect("A17 Gram is nondegenerate");
    let mut w_square = BigRat::zero();
    for i in 0..17 {
        for j in 0..17 {
            w_square += &w[i] * &w[j] * BigRat::from(a17.entry(i, j).clone());
        }
    }
    let w_square_int: i64 = if w_square.is_integer() {
        (&w_square.to_integer()).try_into().unwrap_or(i64::MIN)
    } else {
        i64::MIN
    };
    let three = BigRat::from(BigInt::from(3));
    let triple_integral = w.iter().all(|x| (x * &three).is_integer());
    let w_not_integral = w.iter().any(|x| !x.is_integer());

    // 3w = Σ aᵢΘᵢ has unit coefficient at Θ₁₇, so {Θ₁, …, Θ₁₆, w} is a
    // basis of the overlattice.
    let triple_last = (&w[16] * &three).to_integer();
    let mut vectors: Vec<Vec<BigRat>> = (0..16)
        .map(|i| {
            (0..17)
                .map(|j| {
                    if i == j {
                        BigRat::from(BigInt::from(1))
                    } else {
                        BigRat::zero()
                    }
                })
                .collect()
        })
        .collect();
    vectors.push(w.clone());
    let a17_prime = a17.gram_of_vectors(&vectors)?;
    let a17_prime_det = a17_prime.determinant();
    let a17_prime_disc = a17_prime.smith_form()?;

    let after = u.direct_sum(&a17_prime).direct_sum(&rank1);
    let det_after = after.determinant();
    let drop = &det_before / &det_after;

    let mut checks = Vec::new();
    checks.push(check("w^2 = -4", w_square_int, w_square_int == -4));
    checks.push(check("3w lies in A17", 0, triple_integral));
    checks.push(check("w itself is not in A17", 0, w_not_integral));
    checks.push(check(
        "coefficient of Theta17 in 3w is a unit",
        (&triple_last).try_into().unwrap_or(i64::MIN),
        triple_last.clone() == BigInt::from(1) || triple_last == BigInt::from(-1),
    ));
    checks.push(check(
        "|det| drops by exactly 9",
        (&drop).try_into().unwrap_or(i64::MIN),
        drop == BigInt::from(9) && (&det_before % &det_after).is_zero(),
    ));
    checks.push(check(
        "discriminant group of A17' has order 2",
        (&a17_prime_disc.order()).try_into().unwrap_or(i64::MIN),
        a17_prime_disc.order() == BigInt::from(2),
    ));
    let pass = checks.iter().all(|c| c.pass);

    Ok(OverlatticeA17 {
        schema_version: 1,
        c0,
        det_before: det_before.to_string(),
        det_after: det_after.to_string(),
        drop_factor: drop.to_string(),
        w_square: w_square_int,
        glue_triple_integral: triple_integral,
        a17_prime_det: a17_prime_det.to_string(),
        a17_prime_discriminant_order: a17_prime_disc.order().to_string(),
        checks,
        pass,
    })
}

/// Graphviz rendering of the `I_{r+1}` fibre cycle `Θ₀ - Θ₁ - … - Θ_r - Θ₀`.
pub fn fibre_cycle_dot(r: usize) -> String {
    let mut out = String::from("graph fibre_cycle {\n");
    for i in 0..=r {
        out.push_str(&format!("  \"Theta{i}\";\n"));
    }
    for i in 0..=r {
        let j = (i + 1) % (r + 1);
        out.push_str(&format!("  \"Theta{i}\" -- \"Theta{j}\";\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_self_check_all_r() {
        for r in 1..=17 {
            let m = NSModel::standard(r, 2).unwrap();
            let t0 = m.theta0(0).unwrap();
            assert_eq!(m.square(&t0).unwrap(), -2, "r={r}");
            if r == 1 {
                // The I2 fibre is the doubled bond.
                assert_eq!(m.intersect(&t0, &m.theta(0, 1).unwrap()).unwrap(), 2);
            } else {
                assert_eq!(m.intersect(&t0, &m.theta(0, 1).unwrap()).unwrap(), 1);
                assert_eq!(m.intersect(&t0, &m.theta(0, r).unwrap()).unwrap(), 1);
            }
            for j in 2..r {
                assert_eq!(m.intersect(&t0, &m.theta(0, j).unwrap()).unwrap(), 0);
            }
            // F = Theta0 + ... + Theta_r.
            let mut sum = t0.clone();
            for i in 1..=r {
                sum = sum.add(&m.theta(0, i).unwrap());
            }
            assert_eq!(sum, m.f_class());
            // O meets the identity component only.
            assert_eq!(m.intersect(&m.o_class(), &t0).unwrap(), 1);
        }
    }

    #[test]
    fn intersection_bullets_worked_example() {
        // N = 10, d = 3, c0 = 2.
        let m = NSModel::standard(5, 2).unwrap();
        let h = m
            .f_class()
            .scale(10)
            .add(&m.o_class().scale(3))
            .add(&m.v_class().unwrap());
        assert_eq!(m.intersect(&h, &m.o_class()).unwrap(), 4); // N - 2d
        let p = m.p_class().unwrap();
        assert_eq!(m.intersect(&h, &p).unwrap(), 6); // N - 2c0 + (c0-2)d
        assert_eq!(m.square(&h).unwrap(), 38); // 2d(N-d) - 2c0
        assert_eq!(m.intersect(&h, &m.f_class()).unwrap(), 3);
    }

    #[test]
    fn p_and_v_round_trip() {
        let m = NSModel::standard(3, 5).unwrap();
        let p = m.p_class().unwrap();
        let v = p.add(&m.o_class().scale(-1)).add(&m.f_class().scale(-5));
        assert_eq!(v, m.v_class().unwrap());
        assert_eq!(m.square(&p).unwrap(), -2); // sections are (-2)-classes
        assert_eq!(m.intersect(&p, &m.f_class()).unwrap(), 1);
        assert_eq!(m.intersect(&p, &m.o_class()).unwrap(), 5 - 2); // c0 - 2
    }

    #[test]
    fn h_square_identity_sweep() {
        for d in 3..=6i64 {
            for n in (2 * d + 1)..(2 * d + 6) {
                for c0 in 2..=d + 1 {
                    let m = NSModel::standard(4, c0).unwrap();
                    let h = m
                        .f_class()
                        .scale(n)
                        .add(&m.o_class().scale(d))
                        .add(&m.v_class().unwrap());
                    assert_eq!(m.square(&h).unwrap(), 2 * d * (n - d) - 2 * c0);
                }
            }
        }
    }

    #[test]
    fn reflect_examples() {
        let m = NSModel::standard(3, 2).unwrap();
        let t1 = m.theta(0, 1).unwrap();
        assert_eq!(m.reflect(&t1, &t1).unwrap(), t1.scale(-1));
        assert_eq!(m.reflect(&m.f_class(), &t1).unwrap(), m.f_class());
        assert_eq!(m.reflect(&m.o_class(), &t1).unwrap(), m.o_class());
        // Reflection requires a (-2)-root.
        assert!(m.reflect(&t1, &m.f_class()).is_err());
    }

    #[test]
    fn reflect_is_an_isometry_and_involution() {
        let m = NSModel::standard(5, 3).unwrap();
        let x = DivisorClass(vec![3, -1, 2, 0, 5, -2, 1, 4]);
        let y = DivisorClass(vec![-2, 4, 0, 1, -3, 2, 2, 0]);
        let root = m.theta(0, 2).unwrap();
        let rx = m.reflect(&x, &root).unwrap();
        let ry = m.reflect(&y, &root).unwrap();
        assert_eq!(m.intersect(&x, &y).unwrap(), m.intersect(&rx, &ry).unwrap());
        assert_eq!(m.reflect(&rx, &root).unwrap(), x);
    }

    #[test]
    fn quasi_ample_gate() {
        assert!(quasi_ample_check(5, 2, 10, 3).unwrap().pass);
        assert!(!quasi_ample_check(5, 2, 6, 3).unwrap().pass); // N <= 2d
        assert!(!quasi_ample_check(5, 10, 10, 3).unwrap().pass); // N <= c0+1
        assert!(quasi_ample_check(5, 2, 10, 2).is_err()); // d < 3
        // The bullet checks agree with the closed gate N > max(2d, c0+1).
        for n in 4..=14 {
            for c0 in 2..=8 {
                let report = quasi_ample_check(3, c0, n, 3).unwrap();
                assert_eq!(report.pass, n > (2 * 3).max(c0 + 1), "N={n}, c0={c0}");
            }
        }
    }

    #[test]
    fn witness_iii_worked_example() {
        let w = witness_iii(3, 8, 5).unwrap();
        assert_eq!(w.c0, 4);
        assert_eq!(w.n, 7);
        assert_eq!(w.h_square, 16);
        assert_eq!(w.r0, 5);
        assert_eq!(w.rd_lower, 19);
        assert_eq!(
            w.fibres,
            vec![FibreCount { n: 6, count: 1 }, FibreCount { n: 1, count: 18 }]
        );
        assert!(w.pass);
    }

    #[test]
    fn witness_iii_floor() {
        assert!(witness_iii(3, 8, 5).is_ok());
        assert!(witness_iii(3, 7, 5).is_err());
        assert!(witness_iii(2, 100, 5).is_err());
        assert!(witness_iii(3, 100, 18).is_err());
    }

    #[test]
    fn witness_iii_d4_h100_r17() {
        let w = witness_iii(4, 100, 17).unwrap();
        assert_eq!(w.c0, 4);
        assert_eq!(w.n, 30);
        assert_eq!(
            w.fibres,
            vec![FibreCount { n: 18, count: 1 }, FibreCount { n: 1, count: 6 }]
        );
        assert!(w.pass);
    }

    #[test]
    fn witness_unconditional_worked_example() {
        let w = witness_unconditional(3, 22, 5, 14).unwrap();
        assert_eq!(w.n, 7);
        assert_eq!(w.c0, 2);
        assert_eq!(w.four_squares, [1, 1, 0, 0]);
        assert_eq!(w.r_split, [7, 7, 0]);
        assert_eq!(w.h_square, 44);
        assert!(w.h_square >= 4 * 3 * 3 + 2);
        assert!(w.pass);
        assert_eq!(
            w.fibres,
            vec![
                FibreCount { n: 8, count: 1 },
                FibreCount { n: 8, count: 1 },
                FibreCount { n: 1, count: 8 }
            ]
        );
    }

    #[test]
    fn witness_unconditional_preconditions() {
        assert!(witness_unconditional(3, 21, 5, 14).is_err()); // below floor
        assert!(witness_unconditional(3, 22, 5, 15).is_err()); // r cap at p=1 mod 4
        assert!(witness_unconditional(3, 22, 3, 14).is_err()); // r cap at p=3 mod 4
        assert!(witness_unconditional(3, 22, 3, 13).is_ok());
        assert!(witness_unconditional(3, 22, 4, 14).is_err()); // p not prime
    }

    #[test]
    fn straightening_yields_nonnegative_pairings() {
        let m = NSModel::with_fibres(&[7, 7, 1, 1, 1, 1]).unwrap();
        let d = 3i64;
        let divisor = m
            .f_class()
            .add(&m.o_class())
            .scale(d)
            .add(&m.theta(2, 1).unwrap())
            .add(&m.theta(3, 1).unwrap());
        let d_plus_f = divisor.add(&m.f_class());
        let before_sq = m.square(&d_plus_f).unwrap();
        let roots = m.fibre_roots();
        let (d0, steps) = m.straighten(&d_plus_f, &roots).unwrap();
        assert!(steps > 0);
        assert_eq!(m.square(&d0).unwrap(), before_sq);
        assert_eq!(m.intersect(&d0, &m.f_class()).unwrap(), d);
        for root in &roots {
            assert!(m.intersect(&d0, root).unwrap() >= 0);
        }
    }

    #[test]
    fn overlattice_drops_determinant_by_nine() {
        let o = overlattice_a17(2).unwrap();
        assert_eq!(o.det_before, "-72");
        assert_eq!(o.det_after, "-8");
        assert_eq!(o.drop_factor, "9");
        assert_eq!(o.w_square, -4);
        assert!(o.glue_triple_integral);
        assert_eq!(o.a17_prime_det, "-2");
        assert_eq!(o.a17_prime_discriminant_order, "2");
        assert!(o.pass);
        for c0 in 3..=6 {
            let o = overlattice_a17(c0).unwrap();
            assert_eq!(o.drop_factor, "9");
            assert!(o.pass);
        }
    }

    #[test]
    fn fibre_cycle_dot_renders() {
        let dot = fibre_cycle_dot(5);
        assert!(dot.contains("\"Theta0\" -- \"Theta1\""));
        assert!(dot.contains("\"Theta5\" -- \"Theta0\""));
    }
}
