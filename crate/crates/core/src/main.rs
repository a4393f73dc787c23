fn main() -> std::process::ExitCode {
    spinfact::cli::main()
}
