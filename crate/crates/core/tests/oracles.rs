use lvrae_core::flow::{euler_sample, train_flow, FlowTrainConfig, ShiftSchedule, VelocityModel};
use lvrae_core::lvrae::{
    adaptive_gan_weight, rec_loss, BaseMap, FourierBasis, LossWeights, LvraeModel, SignalSource, SignalSpec,
    Stage1Config,
};
use lvrae_core::metrics::{amplification, energy_distance};
use lvrae_core::numerics::{gaussian, layer_norm_rows};
use lvrae_core::{Mat, RngState};

fn moments(x: &Mat) -> (Vec<f64>, Mat) {
    let mean = x.column_means();
    let d = x.cols();
    let n = x.rows() as f64;
    let cov = Mat::from_fn(d, d, |i, j| {
        x.row_iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / n
    });
    (mean, cov)
}

/// Posterior-mean velocity `E[ε - x0 | x_t = x]` for `x0 ~ N(μ, s² I)`.
fn gaussian_velocity(mu: f64, s2: f64) -> impl Fn(&Mat, f64) -> Mat {
    move |x: &Mat, t: f64| {
        let var = (1.0 - t) * (1.0 - t) * s2 + t * t;
        let cov = t - (1.0 - t) * s2;
        x.map(|v| -mu + cov / var * (v - (1.0 - t) * mu))
    }
}

#[test]
fn exact_velocity_transports_to_gaussian_target() {
    let (mu, s2) = (1.5, 0.25);
    let field = (2usize, gaussian_velocity(mu, s2));
    let x = euler_sample(&field, 20_000, 400, &ShiftSchedule::identity(), &mut RngState::new(3)).unwrap();
    let (mean, cov) = moments(&x);
    // Monte-Carlo standard errors are ~0.004 (mean) and ~0.003 (variance)
    for m in mean {
        assert!((m - mu).abs() < 0.02, "mean {m}");
    }
    for i in 0..2 {
        assert!((cov[(i, i)] - s2).abs() < 0.02, "variance {}", cov[(i, i)]);
    }
    assert!(cov[(0, 1)].abs() < 0.02);
}

#[test]
fn exact_velocity_is_shift_agnostic() {
    let field = (2usize, gaussian_velocity(-0.5, 1.0));
    let x = euler_sample(&field, 20_000, 400, &ShiftSchedule::new(4.0).unwrap(), &mut RngState::new(4)).unwrap();
    let (mean, cov) = moments(&x);
    assert!(mean.iter().all(|m| (m + 0.5).abs() < 0.03));
    assert!((cov[(0, 0)] - 1.0).abs() < 0.05 && (cov[(1, 1)] - 1.0).abs() < 0.05);
}

/// `E‖ε‖` for `ε ~ N(0, I_d)`.
fn chi_mean(d: usize) -> f64 {
    std::f64::consts::SQRT_2 * libm::tgamma((d as f64 + 1.0) / 2.0) / libm::tgamma(d as f64 / 2.0)
}

#[test]
fn amplification_of_linear_map_matches_chi_mean() {
    let mut rng = RngState::new(11);
    for (d, gain) in [(2usize, 1.0), (8, 3.0), (32, 0.5)] {
        let z = gaussian(&mut rng, 500, d);
        let amp = amplification(|m| Ok(m.scale(gain)), &z, 0.1, 20, &mut rng).unwrap();
        let want = gain * chi_mean(d);
        assert!((amp - want).abs() / want < 0.01, "d={d}: {amp} vs {want}");
    }
}

#[test]
fn flow_learns_a_shifted_gaussian() {
    let mut rng = RngState::new(5);
    let mut model = VelocityModel::new(2, &[64, 64], &mut rng).unwrap();
    let cfg = FlowTrainConfig {
        steps: 1500,
        ..FlowTrainConfig::default()
    };
    let trace = train_flow(&mut model, |r, n| gaussian(r, n, 2).map(|v| 0.5 * v + 2.0), &cfg, &mut rng).unwrap();
    let head: f64 = trace[..100].iter().sum::<f64>() / 100.0;
    let tail: f64 = trace[trace.len() - 100..].iter().sum::<f64>() / 100.0;
    assert!(tail < head);
    let x = euler_sample(&model, 4000, 100, &ShiftSchedule::identity(), &mut rng).unwrap();
    let (mean, _) = moments(&x);
    assert!(mean.iter().all(|m| (m - 2.0).abs() < 0.15), "{mean:?}");
    let target = gaussian(&mut rng, 4000, 2).map(|v| 0.5 * v + 2.0);
    let noise = gaussian(&mut rng, 4000, 2);
    assert!(energy_distance(&x, &target).unwrap() < 0.1 * energy_distance(&noise, &target).unwrap());
}

#[test]
fn gan_weight_balances_gradient_scale() {
    let mut rng = RngState::new(9);
    let g: Vec<f64> = (0..8256).map(|_| rng.normal()).collect();
    let r: Vec<f64> = (0..8256).map(|_| rng.normal()).collect();
    let base = adaptive_gan_weight(&r, &g).unwrap() * lvrae_core::numerics::norm(&g);
    for c in [1e-3, 1.0, 1e3] {
        let cg: Vec<f64> = g.iter().map(|v| c * v).collect();
        let scaled = adaptive_gan_weight(&r, &cg).unwrap() * lvrae_core::numerics::norm(&cg);
        assert!((scaled - base).abs() / base < 1e-6, "c={c}");
    }
}

#[test]
fn rec_loss_hand_example() {
    // a pure first-harmonic cosine against zero: L1 is the mean of |cos|,
    // and only band 1 carries energy (mean power 1/2)
    let n = 16;
    let basis = FourierBasis::new(n).unwrap();
    let x: Vec<f64> = (0..n).map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
    let zero = vec![0.0; n];
    let l1 = x.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    let got = rec_loss(&basis, &x, &zero, &LossWeights::default()).unwrap();
    assert!((got - (l1 + 0.5)).abs() < 1e-12, "{got}");
}

#[test]
fn fresh_model_latent_is_normalized_base_feature() {
    let spec = SignalSpec::default();
    let src = SignalSource::new(spec.clone()).unwrap();
    let root = RngState::new(2);
    let phi = BaseMap::with_feature_std(&spec, 32, 0.25, &mut root.split(0)).unwrap();
    let m = LvraeModel::new(&phi, &[32], &[32], &mut root.split(1)).unwrap();
    let (x, _) = src.batch(20, &mut root.split(2));
    let u = phi.features_rows(&x).unwrap();
    let z = m.encode_rows(&phi, &x).unwrap();
    assert_eq!(z, layer_norm_rows(&u, phi.ln()).unwrap());
}

#[test]
fn feature_std_sets_feature_scale() {
    let spec = SignalSpec {
        sigma_v: 0.0,
        ..SignalSpec::default()
    };
    let src = SignalSource::new(spec.clone()).unwrap();
    for s in [0.1, 1.0, 3.0] {
        let phi = BaseMap::with_feature_std(&spec, 32, s, &mut RngState::new(1)).unwrap();
        let (x, _) = src.batch(50, &mut RngState::new(2));
        let u = phi.features_rows(&x).unwrap();
        for r in u.row_iter() {
            let ms = r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64;
            assert!((ms - s * s).abs() < 1e-9 * s * s, "{ms}");
        }
        assert!(phi.ln().gain.iter().all(|&g| g == s));
    }
    assert!(BaseMap::with_feature_std(&spec, 32, 0.0, &mut RngState::new(1)).is_err());
    assert!(BaseMap::with_feature_std(&spec, 32, f64::NAN, &mut RngState::new(1)).is_err());
}

#[test]
fn eta_ramp() {
    let cfg = Stage1Config {
        steps: 100,
        eta_warmup_frac: 0.5,
        ..Stage1Config::default()
    };
    assert_eq!(cfg.eta_at(5.0, 0), 0.0);
    assert!((cfg.eta_at(5.0, 25) - 2.5).abs() < 1e-15);
    assert_eq!(cfg.eta_at(5.0, 50), 5.0);
    assert_eq!(cfg.eta_at(5.0, 99), 5.0);
    let flat = Stage1Config::default();
    assert_eq!(flat.eta_at(5.0, 0), 5.0);
}
