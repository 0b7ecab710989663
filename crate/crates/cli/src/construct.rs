use anyhow::{bail, Context, Result};
use bicover::codeforge::{bch_extended_dimension, even_weight_code, greedy_gv_code, BchCode, CodeError};
use bicover::coverkit::{
    balanced_bipartitions_covering, code_to_covering, coloring_to_covering, hadamard_covering, words_to_covering,
    Covering,
};
use bicover::graphlib::{greedy_coloring, Graph};
use bicover::{ceil_log2, Limits};
use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    EvenWeight,
    Gv,
    Bch,
    Hadamard,
    Balanced,
    Coloring,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::EvenWeight => "even-weight",
            Method::Gv => "gv",
            Method::Bch => "bch",
            Method::Hadamard => "hadamard",
            Method::Balanced => "balanced",
            Method::Coloring => "coloring",
        }
    }

    /// Methods that build coverings of `K_n^λ`, in sweep order.
    pub const COMPLETE: [Method; 5] = [
        Method::EvenWeight,
        Method::Gv,
        Method::Bch,
        Method::Hadamard,
        Method::Balanced,
    ];
}

pub struct Built {
    pub covering: Covering,
    /// Multiplicity the method guarantees on every required pair.
    pub guaranteed_lambda: usize,
    pub params: Value,
}

/// Fails when the method cannot reach `lambda` on `n` vertices.
pub fn build(method: Method, n: usize, lambda: usize, graph: Option<&Graph>, limits: &Limits) -> Result<Built> {
    if n < 2 {
        bail!("constructions need n >= 2, got {n}");
    }
    if lambda == 0 {
        bail!("lambda must be at least 1");
    }
    let built = match method {
        Method::EvenWeight => {
            let k = ceil_log2(n as u64) as usize + 1;
            let code = even_weight_code(k, limits)?;
            let cc = code_to_covering(&code, n)?;
            Built {
                covering: cc.covering,
                guaranteed_lambda: 2,
                params: json!({ "k": k, "dropped_rows": cc.dropped_rows }),
            }
        }
        Method::Gv => {
            let mut k = (ceil_log2(n as u64) as usize).max(lambda);
            let code = loop {
                match greedy_gv_code(k, lambda, n, limits) {
                    Ok(code) => break code,
                    Err(CodeError::TargetUnreached { .. }) => k += 1,
                    Err(e) => return Err(e).context(format!("greedy code with {n} words at distance {lambda}")),
                }
            };
            let cc = code_to_covering(&code, n)?;
            Built {
                covering: cc.covering,
                guaranteed_lambda: lambda,
                params: json!({ "k": k, "d": lambda, "dropped_rows": cc.dropped_rows }),
            }
        }
        Method::Bch => {
            let d = lambda.div_ceil(2).max(2);
            let need = ceil_log2(n as u64) as usize;
            let m = (2..=16u32)
                .find(|&m| bch_extended_dimension(m, d).is_ok_and(|dim| dim >= need))
                .with_context(|| format!("no extended BCH code with m <= 16 has {n} words at distance {}", 2 * d))?;
            let bch = BchCode::new(m, d)?;
            let words = bch.first_codewords(n)?;
            let cc = words_to_covering(&words, bch.length());
            Built {
                covering: cc.covering,
                guaranteed_lambda: bch.guaranteed_distance(),
                params: json!({
                    "m": m,
                    "d": d,
                    "length": bch.length(),
                    "dimension": bch.dimension(),
                    "dropped_rows": cc.dropped_rows,
                }),
            }
        }
        Method::Hadamard => {
            if !n.is_power_of_two() {
                bail!("hadamard needs n a power of two, got {n}");
            }
            let m = n.trailing_zeros();
            Built {
                covering: hadamard_covering(m, limits)?,
                guaranteed_lambda: n / 2,
                params: json!({ "m": m }),
            }
        }
        Method::Balanced => {
            let covering = balanced_bipartitions_covering(n, limits)?;
            Built {
                covering,
                guaranteed_lambda: binomial(n - 2, n / 2 - 1),
                params: json!({}),
            }
        }
        Method::Coloring => {
            let g = graph.context("method coloring needs --graph")?;
            let coloring = greedy_coloring(g);
            let colors = coloring.iter().max().map_or(0, |&c| c + 1);
            Built {
                covering: coloring_to_covering(g, &coloring)?,
                guaranteed_lambda: 1,
                params: json!({ "colors": colors, "coloring": coloring }),
            }
        }
    };
    if lambda > built.guaranteed_lambda {
        bail!(
            "method {} guarantees lambda={} only on n={n}, requested {lambda}",
            method.name(),
            built.guaranteed_lambda
        );
    }
    Ok(built)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
