//! Drive the command-line front end from code: a config file supplies the
//! run, flags override it, output is JSON.
//!
//! cargo run --example cli_config

fn main() {
    let dir = std::env::temp_dir();
    let path = dir.join("statres-example.conf");
    std::fs::write(&path, "# Poisson, long illumination\nmodel = poisson\nt = 500\nn = 200\nalpha = 0.05\n")
        .expect("temp dir is writable");
    let cfg = path.to_str().unwrap();
    for method in ["asymptotic", "exact"] {
        let code =
            statres::cli::run_from(["statres", "resolve", "--config", cfg, "--method", method, "--format", "text"]);
        assert_eq!(code, 0);
    }
    std::fs::remove_file(path).ok();
}
