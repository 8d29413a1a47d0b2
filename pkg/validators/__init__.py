# Validators: precoder solution and result table checks
