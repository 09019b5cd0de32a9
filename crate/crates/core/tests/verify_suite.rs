use minkfield::verify::{run_suite, Budgets};

#[test]
fn suite_defaults_pass() {
    let reports = run_suite(4242, &Budgets::default()).unwrap();
    for r in &reports {
        println!(
            "{} pass={} runtime={:.2}s",
            r.name, r.pass, r.runtime_s
        );
    }
    assert!(reports.iter().all(|r| r.pass));
}
