fn main() -> std::process::ExitCode {
    hadamard_ergodic::cli::main()
}
