# symdyn tests
