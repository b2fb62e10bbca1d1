# Services package for symdyn
