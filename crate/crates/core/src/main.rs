fn main() -> std::process::ExitCode {
    privmon::cli::main()
}
