from hsvd.cli.dispatch import main

main()
