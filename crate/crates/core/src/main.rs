fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(cxhyp::cli::run(std::env::args_os()))
}
