//! Compartment densities, rate constants and the two mean-field rumor models.
//!
//! The classic model tracks ignorants `I`, spreaders `S` and stiflers `R`.
//! The blockchain model splits the ignorants into enrolled (`I_B`) and
//! non-enrolled (`I_N`) classes with their own conversion probabilities.
//! All quantities are densities (fractions of the population) and all
//! rates are per day.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Tolerance on the component sum of a valid state.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn check_non_negative(field: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ModelError::field(
            field,
            format!("must be a finite value >= 0, got {value}"),
        ));
    }
    Ok(())
}

fn check_unit(field: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(ModelError::field(field, format!("must lie in [0, 1], got {value}")));
    }
    Ok(())
}

fn check_pair(field: &'static str, lambda: f64, eta: f64) -> Result<(), ModelError> {
    // Spreading and losing interest are exclusive outcomes of a single contact.
    if lambda + eta > 1.0 + 1e-12 {
        return Err(ModelError::field(
            field,
            format!("spreader and stifler probabilities sum to {} > 1", lambda + eta),
        ));
    }
    Ok(())
}

fn check_sum(values: &[f64]) -> Result<(), ModelError> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(ModelError::NotNormalized { sum });
    }
    Ok(())
}

/// Rate constants of the classic ignorant/spreader/stifler model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateParams {
    /// Probability per contact that an ignorant becomes a spreader.
    pub lambda: f64,
    /// Probability per contact that an ignorant becomes a stifler.
    pub eta: f64,
    /// Probability per contact that a spreader meeting a spreader or stifler stops spreading.
    pub gamma: f64,
    /// Forgetting rate of spreaders, per day.
    pub delta: f64,
    /// Mean degree of the contact network.
    pub k_bar: f64,
}

impl RateParams {
    pub fn new(lambda: f64, eta: f64, gamma: f64, delta: f64, k_bar: f64) -> Result<Self, ModelError> {
        let params = RateParams {
            lambda,
            eta,
            gamma,
            delta,
            k_bar,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_non_negative("lambda", self.lambda)?;
        check_non_negative("eta", self.eta)?;
        check_non_negative("gamma", self.gamma)?;
        check_non_negative("delta", self.delta)?;
        check_non_negative("k_bar", self.k_bar)?;
        if self.k_bar <= 0.0 {
            return Err(ModelError::field("k_bar", "must be > 0"));
        }
        check_pair("lambda", self.lambda, self.eta)
    }
}

/// Rate constants of the model with blockchain-enrolled ignorants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRateParams {
    pub lambda_b: f64,
    pub eta_b: f64,
    pub lambda_n: f64,
    pub eta_n: f64,
    pub gamma: f64,
    pub delta: f64,
    pub k_bar: f64,
}

impl BlockRateParams {
    /// The enrolled/non-enrolled split used throughout the experiments:
    /// `lambda_b = 0.3`, `eta_b = 0.7`, `lambda_n = 0.8`, `eta_n = 0.2`.
    pub fn reference(gamma: f64, delta: f64, k_bar: f64) -> Self {
        BlockRateParams {
            lambda_b: 0.3,
            eta_b: 0.7,
            lambda_n: 0.8,
            eta_n: 0.2,
            gamma,
            delta,
            k_bar,
        }
    }

    /// Checks field ranges. With `contract_regime` set, additionally requires
    /// enrolled ignorants to spread less and lose interest more than
    /// non-enrolled ones (`lambda_b < lambda_n`, `eta_b > eta_n`).
    pub fn validate(&self, contract_regime: bool) -> Result<(), ModelError> {
        check_non_negative("lambda_b", self.lambda_b)?;
        check_non_negative("eta_b", self.eta_b)?;
        check_non_negative("lambda_n", self.lambda_n)?;
        check_non_negative("eta_n", self.eta_n)?;
        check_non_negative("gamma", self.gamma)?;
        check_non_negative("delta", self.delta)?;
        check_non_negative("k_bar", self.k_bar)?;
        if self.k_bar <= 0.0 {
            return Err(ModelError::field("k_bar", "must be > 0"));
        }
        check_pair("lambda_b", self.lambda_b, self.eta_b)?;
        check_pair("lambda_n", self.lambda_n, self.eta_n)?;
        if contract_regime {
            if self.lambda_b >= self.lambda_n {
                return Err(ModelError::field(
                    "lambda_b",
                    "must be below lambda_n in the contract regime",
                ));
            }
            if self.eta_b <= self.eta_n {
                return Err(ModelError::field("eta_b", "must exceed eta_n in the contract regime"));
            }
        }
        Ok(())
    }

    /// Rates seen by non-enrolled ignorants, as a classic-model parameter set.
    pub fn non_enrolled(&self) -> RateParams {
        RateParams {
            lambda: self.lambda_n,
            eta: self.eta_n,
            gamma: self.gamma,
            delta: self.delta,
            k_bar: self.k_bar,
        }
    }
}

/// A fixed-size vector of compartment densities.
pub trait Density: Copy + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Array: Copy + fmt::Debug + AsRef<[f64]> + AsMut<[f64]> + Send + Sync;

    /// Column labels, in array order.
    const LABELS: &'static [&'static str];

    fn to_array(&self) -> Self::Array;

    /// Wraps raw components. No invariant is checked.
    fn from_array(values: Self::Array) -> Self;

    fn spreaders(&self) -> f64;

    fn stiflers(&self) -> f64;

    fn ignorants(&self) -> f64;

    fn validate(&self) -> Result<(), ModelError> {
        let values = self.to_array();
        for (value, label) in values.as_ref().iter().zip(Self::LABELS) {
            check_unit(label, *value)?;
        }
        check_sum(values.as_ref())
    }
}

/// Densities of the classic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirState {
    pub i: f64,
    pub s: f64,
    pub r: f64,
}

impl SirState {
    pub fn new(i: f64, s: f64, r: f64) -> Result<Self, ModelError> {
        let state = SirState { i, s, r };
        state.validate()?;
        Ok(state)
    }
}

impl Density for SirState {
    type Array = [f64; 3];
    const LABELS: &'static [&'static str] = &["i", "s", "r"];

    fn to_array(&self) -> [f64; 3] {
        [self.i, self.s, self.r]
    }

    fn from_array([i, s, r]: [f64; 3]) -> Self {
        SirState { i, s, r }
    }

    fn spreaders(&self) -> f64 {
        self.s
    }

    fn stiflers(&self) -> f64 {
        self.r
    }

    fn ignorants(&self) -> f64 {
        self.i
    }
}

/// Densities of the blockchain model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsirState {
    pub i_b: f64,
    pub i_n: f64,
    pub s: f64,
    pub r: f64,
}

impl BsirState {
    pub fn new(i_b: f64, i_n: f64, s: f64, r: f64) -> Result<Self, ModelError> {
        let state = BsirState { i_b, i_n, s, r };
        state.validate()?;
        Ok(state)
    }
}

impl Density for BsirState {
    type Array = [f64; 4];
    const LABELS: &'static [&'static str] = &["i_b", "i_n", "s", "r"];

    fn to_array(&self) -> [f64; 4] {
        [self.i_b, self.i_n, self.s, self.r]
    }

    fn from_array([i_b, i_n, s, r]: [f64; 4]) -> Self {
        BsirState { i_b, i_n, s, r }
    }

    fn spreaders(&self) -> f64 {
        self.s
    }

    fn stiflers(&self) -> f64 {
        self.r
    }

    fn ignorants(&self) -> f64 {
        self.i_b + self.i_n
    }
}

/// Initial enrollment ratio `I_B(0) / I_N(0)`.
///
/// `Infinite` is the scenario where every ignorant is enrolled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Finite(f64),
    Infinite,
}

impl Epsilon {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Epsilon::Finite(v) if !v.is_finite() || v < 0.0 => Err(ModelError::field(
                "epsilon",
                format!("must be >= 0 or \"inf\", got {v}"),
            )),
            _ => Ok(()),
        }
    }

    /// Fraction of ignorants that are enrolled, `eps / (1 + eps)`.
    pub fn enrolled_fraction(&self) -> f64 {
        match *self {
            Epsilon::Finite(v) => v / (1.0 + v),
            Epsilon::Infinite => 1.0,
        }
    }

    /// Ordering key; `Infinite` sorts after every finite value.
    pub fn as_f64(&self) -> f64 {
        match *self {
            Epsilon::Finite(v) => v,
            Epsilon::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Finite(v) => write!(f, "{v}"),
            Epsilon::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Epsilon {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinite" | "infinity" => Ok(Epsilon::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| ModelError::field("epsilon", format!("cannot parse {s:?}")))?;
                let eps = if v.is_infinite() && v > 0.0 {
                    Epsilon::Infinite
                } else {
                    Epsilon::Finite(v)
                };
                eps.validate()?;
                Ok(eps)
            }
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Epsilon::Finite(v) => serializer.serialize_f64(*v),
            Epsilon::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => {
                let eps = Epsilon::Finite(v);
                eps.validate().map_err(serde::de::Error::custom)?;
                Ok(eps)
            }
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Population size, seed spreaders and enrollment ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub n: u64,
    pub a: u64,
    pub epsilon: Epsilon,
}

impl PopulationConfig {
    pub fn new(n: u64, a: u64, epsilon: Epsilon) -> Result<Self, ModelError> {
        let pop = PopulationConfig { n, a, epsilon };
        pop.validate()?;
        Ok(pop)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 2 {
            return Err(ModelError::field(
                "n",
                format!("population must be >= 2, got {}", self.n),
            ));
        }
        if self.a < 1 || self.a >= self.n {
            return Err(ModelError::field(
                "a",
                format!(
                    "initial spreaders must satisfy 1 <= a < n, got a={} n={}",
                    self.a, self.n
                ),
            ));
        }
        self.epsilon.validate()
    }

    /// Initial ignorant density `(n - a) / n`.
    pub fn ignorant_density(&self) -> f64 {
        (self.n - self.a) as f64 / self.n as f64
    }
}

/// Poisson degree law `P(k) = e^{-k_bar} k_bar^k / k!`, evaluated in log space.
pub fn poisson_pmf(k: u64, k_bar: f64) -> Result<f64, ModelError> {
    if !k_bar.is_finite() || k_bar <= 0.0 {
        return Err(ModelError::field("k_bar", format!("must be > 0, got {k_bar}")));
    }
    let ln_factorial: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    let ln_p = -k_bar + k as f64 * k_bar.ln() - ln_factorial;
    Ok(ln_p.exp().clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirDerivative {
    pub di: f64,
    pub ds: f64,
    pub dr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsirDerivative {
    pub di_b: f64,
    pub di_n: f64,
    pub ds: f64,
    pub dr: f64,
}

fn sir_rates([i, s, r]: [f64; 3], p: &RateParams) -> [f64; 3] {
    let contact = p.k_bar * i * s;
    let stifling = p.gamma * p.k_bar * s * (s + r);
    let forgetting = p.delta * s;
    [
        -(p.lambda + p.eta) * contact,
        p.lambda * contact - stifling - forgetting,
        p.eta * contact + stifling + forgetting,
    ]
}

fn bsir_rates([i_b, i_n, s, r]: [f64; 4], p: &BlockRateParams) -> [f64; 4] {
    let contact_b = p.k_bar * i_b * s;
    let contact_n = p.k_bar * i_n * s;
    let stifling = p.gamma * p.k_bar * s * (s + r);
    let forgetting = p.delta * s;
    [
        -(p.lambda_b + p.eta_b) * contact_b,
        -(p.lambda_n + p.eta_n) * contact_n,
        p.lambda_b * contact_b + p.lambda_n * contact_n - stifling - forgetting,
        p.eta_b * contact_b + p.eta_n * contact_n + stifling + forgetting,
    ]
}

/// Right-hand side of the classic model, per day.
pub fn sir_derivative(state: &SirState, params: &RateParams) -> Result<SirDerivative, ModelError> {
    state.validate()?;
    params.validate()?;
    let [di, ds, dr] = sir_rates(state.to_array(), params);
    Ok(SirDerivative { di, ds, dr })
}

/// Right-hand side of the blockchain model, per day.
pub fn bsir_derivative(state: &BsirState, params: &BlockRateParams) -> Result<BsirDerivative, ModelError> {
    state.validate()?;
    params.validate(false)?;
    let [di_b, di_n, ds, dr] = bsir_rates(state.to_array(), params);
    Ok(BsirDerivative { di_b, di_n, ds, dr })
}

/// `I = (n - a) / n`, `S = a / n`, `R = 0`.
pub fn initial_sir_state(pop: &PopulationConfig) -> Result<SirState, ModelError> {
    pop.validate()?;
    let n = pop.n as f64;
    Ok(SirState {
        i: (pop.n - pop.a) as f64 / n,
        s: pop.a as f64 / n,
        r: 0.0,
    })
}

/// Splits the initial ignorants into enrolled and non-enrolled by `epsilon`.
pub fn initial_bsir_state(pop: &PopulationConfig) -> Result<BsirState, ModelError> {
    pop.validate()?;
    let ignorants = pop.ignorant_density();
    let (i_b, i_n) = match pop.epsilon {
        Epsilon::Infinite => (ignorants, 0.0),
        Epsilon::Finite(eps) => (ignorants * eps / (1.0 + eps), ignorants / (1.0 + eps)),
    };
    Ok(BsirState {
        i_b,
        i_n,
        s: pop.a as f64 / pop.n as f64,
        r: 0.0,
    })
}

/// A mean-field model that the integrator can advance.
pub trait RumorModel: Send + Sync {
    type State: Density;

    /// Time derivative of the raw component vector. Inputs may lie slightly
    /// outside the simplex (intermediate Runge-Kutta stages).
    fn rates(&self, y: <Self::State as Density>::Array) -> <Self::State as Density>::Array;
}

impl RumorModel for RateParams {
    type State = SirState;

    fn rates(&self, y: [f64; 3]) -> [f64; 3] {
        sir_rates(y, self)
    }
}

impl RumorModel for BlockRateParams {
    type State = BsirState;

    fn rates(&self, y: [f64; 4]) -> [f64; 4] {
        bsir_rates(y, self)
    }
}
