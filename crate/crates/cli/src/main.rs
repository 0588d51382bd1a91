use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let code = jelly_cli::run(std::env::args_os(), &mut io::stdin().lock(), &mut io::stdout().lock());
    std::process::exit(code);
}
