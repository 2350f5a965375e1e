//! The full randomized invariant suite at its default sample counts, as one
//! integration gate. Individual checks also run (with larger counts where
//! mandated) inside the acceptance suite.

use xyotto::verify::{run_full_suite, SuiteConfig};

#[test]
fn default_suite_is_green() {
    let report = run_full_suite(1234, SuiteConfig::default());
    for check in &report.checks {
        println!(
            "{} {} ({} samples): {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.samples,
            check.detail
        );
    }
    assert!(report.all_passed());
}

#[test]
fn suite_replays_identically_for_a_fixed_seed() {
    let config = SuiteConfig {
        closed_form_samples: 200,
        g_samples: 500,
        dynamics_samples: 2,
    };
    let a = xyotto::verify::report_fingerprint(&run_full_suite(99, config));
    let b = xyotto::verify::report_fingerprint(&run_full_suite(99, config));
    assert_eq!(a, b);
}
