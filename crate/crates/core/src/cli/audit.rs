use crate::audit::{
    audit_approx_dp, audit_chtp, audit_dp, audit_f_privacy, audit_smooth_dp, audit_testing_bound,
    MetricSpec, PrivacyVerdict,
};
use crate::prob::{DiscreteChannel, FDivergenceSpec, DEFAULT_ENUMERATION_CAP};
use crate::{Error, Result};

/// One `--def name=params` request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefinitionRequest {
    Dp { eps: f64 },
    ApproxDp { eps: f64, delta: f64 },
    TestingBound { eps: f64, delta: f64 },
    Chtp { eps_ch: f64, delta_ch: f64 },
    SmoothDp { eps: f64 },
    Tv { level: f64 },
    Kl { level: f64 },
    ChiSquare { level: f64 },
    Hellinger { level: f64 },
}

pub fn parse_definition(text: &str) -> Result<DefinitionRequest> {
    let (name, params) = text
        .split_once('=')
        .ok_or_else(|| Error::Spec(format!("expected name=params, got `{text}`")))?;
    let values = params
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Spec(format!("bad number `{p}` in `{text}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let want = |k: usize| {
        if values.len() == k {
            Ok(())
        } else {
            Err(Error::Spec(format!(
                "`{name}` takes {k} parameter(s), got {}",
                values.len()
            )))
        }
    };
    use DefinitionRequest::*;
    let req = match name.trim() {
        "dp" => want(1).map(|_| Dp { eps: values[0] }),
        "approx_dp" => want(2).map(|_| ApproxDp {
            eps: values[0],
            delta: values[1],
        }),
        "testing_bound" => want(2).map(|_| TestingBound {
            eps: values[0],
            delta: values[1],
        }),
        "chtp" => want(2).map(|_| Chtp {
            eps_ch: values[0],
            delta_ch: values[1],
        }),
        "smooth_dp" => want(1).map(|_| SmoothDp { eps: values[0] }),
        "tv" => want(1).map(|_| Tv { level: values[0] }),
        "kl" => want(1).map(|_| Kl { level: values[0] }),
        "chi_square" => want(1).map(|_| ChiSquare { level: values[0] }),
        "hellinger" => want(1).map(|_| Hellinger { level: values[0] }),
        other => Err(Error::Spec(format!("unknown definition `{other}`"))),
    }?;
    Ok(req)
}

/// Audits the channel in `channel_json` against every request, in order.
///
/// `cap` may only lower the dataset enumeration cap.
pub fn run_audit(
    channel_json: &str,
    requests: &[DefinitionRequest],
    metric: Option<&MetricSpec>,
    cap: Option<usize>,
) -> Result<Vec<PrivacyVerdict>> {
    let cap = match cap {
        Some(c) if c > DEFAULT_ENUMERATION_CAP => {
            return Err(Error::Spec(format!(
                "--cap can only lower the enumeration cap ({DEFAULT_ENUMERATION_CAP})"
            )))
        }
        Some(c) => c,
        None => DEFAULT_ENUMERATION_CAP,
    };
    let q = DiscreteChannel::from_json(channel_json)?;
    if q.dataset_count() > cap {
        return Err(Error::Resource(format!(
            "channel has {} datasets, cap is {cap}",
            q.dataset_count()
        )));
    }
    requests
        .iter()
        .map(|req| match *req {
            DefinitionRequest::Dp { eps } => audit_dp(&q, eps),
            DefinitionRequest::ApproxDp { eps, delta } => audit_approx_dp(&q, eps, delta),
            DefinitionRequest::TestingBound { eps, delta } => audit_testing_bound(&q, eps, delta),
            DefinitionRequest::Chtp { eps_ch, delta_ch } => audit_chtp(&q, eps_ch, delta_ch),
            DefinitionRequest::SmoothDp { eps } => {
                let discrete = MetricSpec::discrete(q.input_alphabet().len());
                audit_smooth_dp(&q, metric.unwrap_or(&discrete), eps)
            }
            DefinitionRequest::Tv { level } => {
                audit_f_privacy(&q, &FDivergenceSpec::TotalVariation, level)
            }
            DefinitionRequest::Kl { level } => {
                audit_f_privacy(&q, &FDivergenceSpec::KullbackLeibler, level)
            }
            DefinitionRequest::ChiSquare { level } => {
                audit_f_privacy(&q, &FDivergenceSpec::chi_square(), level)
            }
            DefinitionRequest::Hellinger { level } => {
                audit_f_privacy(&q, &FDivergenceSpec::hellinger(), level)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::randomized_response;

    #[test]
    fn parses_definitions() {
        assert_eq!(
            parse_definition("dp=0.1").unwrap(),
            DefinitionRequest::Dp { eps: 0.1 }
        );
        assert_eq!(
            parse_definition("approx_dp=1, 1e-6").unwrap(),
            DefinitionRequest::ApproxDp {
                eps: 1.0,
                delta: 1e-6
            }
        );
        assert!(parse_definition("dp").is_err());
        assert!(parse_definition("dp=1,2").is_err());
        assert!(parse_definition("renyi=2").is_err());
        assert!(parse_definition("dp=abc").is_err());
    }

    #[test]
    fn cap_only_lowers() {
        let json = randomized_response(1.0).unwrap().to_json().unwrap();
        let reqs = [DefinitionRequest::Dp { eps: 1.0 }];
        assert!(run_audit(&json, &reqs, None, None).unwrap()[0].holds);
        assert!(matches!(
            run_audit(&json, &reqs, None, Some(1)),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            run_audit(&json, &reqs, None, Some(DEFAULT_ENUMERATION_CAP + 1)),
            Err(Error::Spec(_))
        ));
    }
}
